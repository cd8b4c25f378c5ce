"""
Hypothesis strategies for alphabets, types, substitutions and systems.

All generated alphabets have constructors of arity <= 1, at least one
nullary constructor, and an order grown by adding random pairs that keep
the alphabet valid.
"""

from collections.abc import Mapping
from typing import List, Sequence, Tuple

import hypothesis.strategies as st

from polysub.core import validate_alphabet
from polysub.models import (
    App,
    Application,
    InequationSystem,
    OrderedTypeAlphabet,
    Parameter,
    ParameterSubstitution,
    PolysubError,
    Signature,
    Type,
    TypeConstructor,
    TypeInequation,
    Var,
)

PARAM_NAMES = ("a", "b", "c")


def grow_order(
    constructors: Sequence[TypeConstructor],
    candidates: Sequence[Tuple[int, int]],
) -> OrderedTypeAlphabet:
    """Add each candidate pair whose addition keeps the alphabet valid."""
    pairs: List[Tuple[str, str]] = []
    alphabet = validate_alphabet(constructors)
    for i, j in candidates:
        pair = (constructors[i].name, constructors[j].name)
        if i == j or pair in pairs:
            continue
        try:
            alphabet = validate_alphabet(constructors, pairs + [pair])
        except PolysubError:
            continue
        pairs.append(pair)
    return alphabet


@st.composite
def alphabets(draw, max_size: int = 5) -> OrderedTypeAlphabet:
    size = draw(st.integers(min_value=1, max_value=max_size))
    arities = [0] + draw(st.lists(st.integers(0, 1), min_size=size - 1, max_size=size - 1))
    arities = draw(st.permutations(arities))
    constructors = [
        TypeConstructor(name=f"{'L' if arity else 'K'}{i}", arity=arity)
        for i, arity in enumerate(arities)
    ]
    index = st.integers(0, size - 1)
    candidates = draw(st.lists(st.tuples(index, index), max_size=2 * size))
    return grow_order(constructors, candidates)


@st.composite
def types(
    draw,
    alphabet: OrderedTypeAlphabet,
    max_depth: int = 3,
    params: Sequence[str] = PARAM_NAMES,
) -> Type:
    """A unary chain over a nullary base or a parameter."""
    bases: List[Type] = [Application(constructor=c) for c in alphabet.nullary]
    bases += [Parameter(name=name) for name in params]
    base = draw(st.sampled_from(bases))
    unary = alphabet.unary
    wraps = draw(st.lists(st.sampled_from(unary), max_size=max_depth - base.depth)) if unary else []
    t: Type = base
    for ctor in wraps:
        t = Application(constructor=ctor, args=(t,))
    return t


def monotypes(alphabet: OrderedTypeAlphabet, max_depth: int = 3):
    return types(alphabet, max_depth=max_depth, params=())


@st.composite
def closed_substitutions(
    draw,
    alphabet: OrderedTypeAlphabet,
    max_depth: int = 3,
    names: Sequence[str] = PARAM_NAMES,
) -> ParameterSubstitution:
    domain = draw(st.lists(st.sampled_from(list(names)), min_size=1, unique=True))
    images = {name: draw(monotypes(alphabet, max_depth)) for name in domain}
    return ParameterSubstitution(bindings=images)


@st.composite
def substitutions(
    draw,
    alphabet: OrderedTypeAlphabet,
    max_depth: int = 3,
) -> ParameterSubstitution:
    domain = draw(st.lists(st.sampled_from(list(PARAM_NAMES)), unique=True))
    return ParameterSubstitution(
        bindings={name: draw(types(alphabet, max_depth)) for name in domain}
    )


@st.composite
def systems(
    draw,
    alphabet: OrderedTypeAlphabet,
    max_size: int = 3,
    max_depth: int = 3,
    params: Sequence[str] = ("a", "b"),
) -> InequationSystem:
    n = draw(st.integers(0, max_size))
    return InequationSystem(
        inequations=tuple(
            TypeInequation(
                lhs=draw(types(alphabet, max_depth, params)),
                rhs=draw(types(alphabet, max_depth, params)),
            )
            for _ in range(n)
        )
    )


@st.composite
def alphabet_with(draw, build, max_size: int = 5, **kwargs):
    """An alphabet together with one value drawn from ``build(alphabet)``."""
    alphabet = draw(alphabets(max_size))
    return alphabet, draw(build(alphabet, **kwargs))


def terms(signatures: Mapping[str, Signature], variables: Sequence[str] = ("x", "y"), max_leaves: int = 6):
    """Well-formed terms over the given signatures and variables."""
    leaves = [App(fn=fn) for fn, sig in signatures.items() if sig.arity == 0]
    leaves += [Var(name=name) for name in variables]
    functions = [(fn, sig.arity) for fn, sig in signatures.items() if sig.arity > 0]

    def extend(children):
        return st.sampled_from(functions).flatmap(
            lambda f: st.lists(children, min_size=f[1], max_size=f[1]).map(
                lambda args: App(fn=f[0], args=tuple(args))
            )
        )

    return st.recursive(st.sampled_from(leaves), extend, max_leaves=max_leaves)
