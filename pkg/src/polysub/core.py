"""
Type Algebra

Ordered type alphabets, the subtype relation extended from constructors
to types, and parameter substitutions.

Every function here is pure over the frozen models in ``models``. The
alphabet order is closed with networkx; the compatibility condition
min(#K, #M) <= #L is checked by an explicit scan over all chains
K <= L <= M.
"""

from __future__ import annotations

from collections.abc import Iterable
from typing import Dict, Tuple, Union

import networkx as nx
import structlog

from polysub.models import (
    Application,
    ErrorCode,
    InequationSystem,
    OrderedTypeAlphabet,
    Parameter,
    ParameterSubstitution,
    PolysubError,
    SystemMarker,
    Truth,
    Type,
    TypeAssignment,
    TypeConstructor,
    TypeInequation,
)

logger = structlog.get_logger()

HasDepth = Union[Type, TypeInequation, InequationSystem, ParameterSubstitution, Truth, SystemMarker]


# =============================================================================
# Alphabets
# =============================================================================

def validate_alphabet(
    constructors: Iterable[TypeConstructor | Tuple[str, int]],
    declared_pairs: Iterable[Tuple[str, str]] = (),
) -> OrderedTypeAlphabet:
    """
    Build an ordered type alphabet from constructors and generating pairs.

    Args:
        constructors: Constructors in declaration order, as models or (name, arity)
        declared_pairs: (K, L) pairs meaning K <= L

    Returns:
        Alphabet whose order is the reflexive-transitive closure of the pairs

    Raises:
        PolysubError: DUPLICATE_CONSTRUCTOR, UNKNOWN_CONSTRUCTOR, ORDER_CYCLE,
            INCOMPATIBLE (details carry the K, L, M triple) or NO_NULLARY
    """
    ctors: list[TypeConstructor] = []
    seen: set[str] = set()
    for item in constructors:
        ctor = item if isinstance(item, TypeConstructor) else TypeConstructor(name=item[0], arity=item[1])
        if ctor.name in seen:
            raise PolysubError(
                ErrorCode.DUPLICATE_CONSTRUCTOR,
                f"type constructor '{ctor.name}' is declared twice",
                details={"name": ctor.name},
            )
        seen.add(ctor.name)
        ctors.append(ctor)

    pairs = list(dict.fromkeys(declared_pairs))
    for lower, upper in pairs:
        for name in (lower, upper):
            if name not in seen:
                raise PolysubError(
                    ErrorCode.UNKNOWN_CONSTRUCTOR,
                    f"order mentions undeclared type constructor '{name}'",
                    details={"name": name},
                )

    graph = nx.DiGraph()
    graph.add_nodes_from(c.name for c in ctors)
    graph.add_edges_from(pairs)
    order = frozenset(nx.transitive_closure(graph, reflexive=True).edges())

    names = [c.name for c in ctors]
    for i, first in enumerate(names):
        for second in names[i + 1:]:
            if (first, second) in order and (second, first) in order:
                raise PolysubError(
                    ErrorCode.ORDER_CYCLE,
                    f"order is not antisymmetric: {first} <= {second} <= {first}",
                    details={"cycle": [first, second]},
                )

    for low in ctors:
        for mid in ctors:
            if (low.name, mid.name) not in order:
                continue
            for high in ctors:
                if (mid.name, high.name) in order and min(low.arity, high.arity) > mid.arity:
                    raise PolysubError(
                        ErrorCode.INCOMPATIBLE,
                        f"arity is incompatible with the order: "
                        f"{low.name} <= {mid.name} <= {high.name} but "
                        f"min(#{low.name}, #{high.name}) = {min(low.arity, high.arity)} > "
                        f"#{mid.name} = {mid.arity}",
                        details={"triple": [low.name, mid.name, high.name]},
                    )

    if not any(c.arity == 0 for c in ctors):
        raise PolysubError(
            ErrorCode.NO_NULLARY,
            "the alphabet needs at least one nullary type constructor",
        )

    logger.debug("alphabet_validated", constructors=len(ctors), order_size=len(order))

    return OrderedTypeAlphabet(constructors=tuple(ctors), order=order, declared=tuple(pairs))


def constructor_leq(alphabet: OrderedTypeAlphabet, lower: str, upper: str) -> bool:
    """K <= L in the closed constructor order."""
    alphabet.constructor(lower)
    alphabet.constructor(upper)
    return alphabet.leq(lower, upper)


# =============================================================================
# Types
# =============================================================================

def subtype(alphabet: OrderedTypeAlphabet, lower: Type, upper: Type) -> bool:
    """
    Decide lower <= upper.

    A parameter is only related to itself. K(σ1..σm) <= L(τ1..τn) holds iff
    K <= L and σi <= τi for the first min(m, n) arguments.
    """
    if isinstance(lower, Parameter) or isinstance(upper, Parameter):
        return lower == upper
    if not alphabet.has(lower.name):
        alphabet.constructor(lower.name)
    if not alphabet.has(upper.name):
        alphabet.constructor(upper.name)
    if not alphabet.leq(lower.name, upper.name):
        return False
    return all(subtype(alphabet, a, b) for a, b in zip(lower.args, upper.args))


def depth_of(x: HasDepth) -> int:
    """Depth of a type, inequation, system or substitution; 0 for true/false."""
    if isinstance(x, (Truth, SystemMarker)):
        return 0
    return x.depth


# =============================================================================
# Substitutions
# =============================================================================

def _apply(bindings: Dict[str, Type], t: Type) -> Type:
    if isinstance(t, Parameter):
        return bindings.get(t.name, t)
    if t.params.isdisjoint(bindings):
        return t
    return Application(constructor=t.constructor, args=tuple(_apply(bindings, a) for a in t.args))


def apply_subst(theta: ParameterSubstitution, t: Type) -> Type:
    """τΘ: replace bound parameters once, without re-substituting into images."""
    if not theta.bindings:
        return t
    return _apply(theta.bindings, t)


def compose(first: ParameterSubstitution, second: ParameterSubstitution) -> ParameterSubstitution:
    """Θ1 ∘ Θ2 with α(Θ1 ∘ Θ2) = (αΘ1)Θ2; identity bindings are dropped."""
    names = sorted(first.domain | second.domain)
    return ParameterSubstitution(
        bindings={name: apply_subst(second, first.image(name)) for name in names}
    )


def restrict(theta: ParameterSubstitution, names: Iterable[str]) -> ParameterSubstitution:
    keep = set(names)
    return ParameterSubstitution(
        bindings={name: t for name, t in theta.bindings.items() if name in keep}
    )


def apply_to_inequation(theta: ParameterSubstitution, ineq: TypeInequation) -> TypeInequation:
    return TypeInequation(lhs=apply_subst(theta, ineq.lhs), rhs=apply_subst(theta, ineq.rhs))


def apply_to_system(theta: ParameterSubstitution, system: InequationSystem) -> InequationSystem:
    """IΘ as a canonical system (instances may collapse)."""
    return InequationSystem(
        inequations=tuple(apply_to_inequation(theta, i) for i in system.inequations)
    )


def apply_to_assignment(theta: ParameterSubstitution, gamma: TypeAssignment) -> TypeAssignment:
    return TypeAssignment(
        bindings={name: apply_subst(theta, t) for name, t in gamma.bindings.items()}
    )


def grounding(names: Iterable[str], alphabet: OrderedTypeAlphabet) -> ParameterSubstitution:
    """Map every given parameter to the first declared nullary constructor."""
    nullary = alphabet.nullary
    if not nullary:
        raise PolysubError(ErrorCode.NO_NULLARY, "no nullary constructor to ground parameters with")
    base = Application(constructor=nullary[0])
    return ParameterSubstitution(bindings={name: base for name in names})

