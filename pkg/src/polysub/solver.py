"""
Inequation Solver

Decides solvability of type inequation systems over alphabets whose
constructors are at most unary, and extracts a witness substitution.

The procedure:
1. nf       - normalize each inequation to a residual inequation with a
              parameter on one side, or to true/false
2. AllParSubst - every depth-1 instantiation Φ of a parameter set with
              Par(αΦ) ⊆ {α}
3. Inst     - normalized instances nf(IΦ) of a system, false ones dropped
4. frontier - breadth-first rounds of Inst with a memory of every system
              seen; success when the empty system appears, failure when a
              round discovers nothing new

Instantiation never adds parameters, inequations or depth, so the memory
is bounded and the loop terminates.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable
from functools import reduce
from typing import Callable, Dict, List, Optional, Tuple

import structlog

from polysub.core import apply_subst, compose, restrict
from polysub.infer import verify_witness
from polysub.models import (
    FALSE_SYSTEM,
    Application,
    ErrorCode,
    InequationSystem,
    NormalizedInequation,
    OrderedTypeAlphabet,
    Parameter,
    ParameterSubstitution,
    PolysubError,
    SolveResult,
    SolveStats,
    SystemMarker,
    Truth,
    Type,
    TypeInequation,
)

logger = structlog.get_logger()

GenerationCallback = Callable[[int, int], None]


# =============================================================================
# Arity guard
# =============================================================================

def _unsupported(name: str, arity: int) -> PolysubError:
    return PolysubError(
        ErrorCode.UNSUPPORTED_ARITY,
        f"type constructor '{name}' has arity {arity}; the solver handles arity <= 1 only",
        details={"name": name, "arity": arity},
    )


def _require_unary_type(t: Type) -> None:
    while isinstance(t, Application):
        if t.constructor.arity > 1:
            raise _unsupported(t.name, t.constructor.arity)
        if not t.args:
            return
        t = t.args[0]


def require_unary_alphabet(alphabet: OrderedTypeAlphabet) -> None:
    for ctor in alphabet.constructors:
        if ctor.arity > 1:
            raise _unsupported(ctor.name, ctor.arity)


# =============================================================================
# nf
# =============================================================================

def _normalize(lhs: Type, rhs: Type, alphabet: OrderedTypeAlphabet) -> NormalizedInequation:
    while True:
        if isinstance(lhs, Parameter) or isinstance(rhs, Parameter):
            return TypeInequation(lhs=lhs, rhs=rhs)
        if not alphabet.leq(lhs.name, rhs.name):
            return Truth.FALSE
        if not lhs.args or not rhs.args:
            return Truth.TRUE
        lhs, rhs = lhs.args[0], rhs.args[0]


def nf_ineq(ineq: TypeInequation, alphabet: OrderedTypeAlphabet) -> NormalizedInequation:
    """
    Normalize one inequation.

    Returns the inequation unchanged when either side is a parameter;
    otherwise compares heads, descending into the arguments only when both
    sides are unary applications.

    Raises:
        PolysubError: UNSUPPORTED_ARITY for a constructor of arity >= 2
    """
    _require_unary_type(ineq.lhs)
    _require_unary_type(ineq.rhs)
    if isinstance(ineq.lhs, Parameter) or isinstance(ineq.rhs, Parameter):
        return ineq
    return _normalize(ineq.lhs, ineq.rhs, alphabet)


def nf_system(
    system: InequationSystem,
    alphabet: OrderedTypeAlphabet,
) -> InequationSystem | SystemMarker:
    """nf of a system: true members dropped, FALSE_SYSTEM if any member is false."""
    kept: list[TypeInequation] = []
    for ineq in system.inequations:
        normal = nf_ineq(ineq, alphabet)
        if normal is Truth.FALSE:
            return FALSE_SYSTEM
        if normal is Truth.TRUE:
            continue
        assert isinstance(normal, TypeInequation)
        kept.append(normal)
    return InequationSystem(inequations=tuple(kept))


# =============================================================================
# AllParSubst and Inst
# =============================================================================

def all_par_subst(
    names: Iterable[str],
    alphabet: OrderedTypeAlphabet,
) -> List[ParameterSubstitution]:
    """
    Every Φ with dom(Φ) = names, depth(Φ) <= 1 and Par(αΦ) ⊆ {α}.

    Each parameter goes to a nullary K or to L(α) for unary L. Parameters
    are taken in sorted order and constructors in declaration order, so
    the enumeration is reproducible.
    """
    require_unary_alphabet(alphabet)
    ordered = sorted(names)
    choices = [
        [
            Application(constructor=c) if c.arity == 0
            else Application(constructor=c, args=(Parameter(name=name),))
            for c in alphabet.constructors
        ]
        for name in ordered
    ]
    return [
        ParameterSubstitution(bindings=dict(zip(ordered, images)))
        for images in itertools.product(*choices)
    ]


def _instantiate(
    system: InequationSystem,
    phi: ParameterSubstitution,
    alphabet: OrderedTypeAlphabet,
) -> InequationSystem | SystemMarker:
    """nf(IΦ), stopping at the first false member."""
    kept: list[TypeInequation] = []
    for ineq in system.inequations:
        normal = _normalize(apply_subst(phi, ineq.lhs), apply_subst(phi, ineq.rhs), alphabet)
        if normal is Truth.FALSE:
            return FALSE_SYSTEM
        if isinstance(normal, TypeInequation):
            kept.append(normal)
    return InequationSystem(inequations=tuple(kept))


def inst(
    system: InequationSystem,
    alphabet: OrderedTypeAlphabet,
) -> List[Tuple[InequationSystem, ParameterSubstitution]]:
    """
    Inst(I) paired with the instantiation that produced each system.

    Distinct systems only; when several Φ lead to the same system the
    first one in enumeration order is kept.
    """
    found: Dict[Tuple[str, ...], Tuple[InequationSystem, ParameterSubstitution]] = {}
    for phi in all_par_subst(system.params, alphabet):
        child = _instantiate(system, phi, alphabet)
        if child is FALSE_SYSTEM:
            continue
        assert isinstance(child, InequationSystem)
        found.setdefault(child.key, (child, phi))
    return list(found.values())


def decompose(
    psi: ParameterSubstitution,
) -> Tuple[ParameterSubstitution, ParameterSubstitution]:
    """
    Split a closed Ψ into Φ1 ∘ Φ2 with Φ1 ∈ AllParSubst(dom(Ψ)).

    Bindings of depth 1 stay in Φ1; a deeper binding α := L(σ) becomes
    α := L(α) in Φ1 and α := σ in Φ2.
    """
    if not psi.is_closed:
        raise ValueError("decompose expects a closed substitution")
    head: dict[str, Type] = {}
    rest: dict[str, Type] = {}
    for name, t in psi.bindings.items():
        assert isinstance(t, Application)
        if t.depth <= 1:
            head[name] = t
        else:
            head[name] = Application(constructor=t.constructor, args=(Parameter(name=name),))
            rest[name] = t.args[0]
    return ParameterSubstitution(bindings=head), ParameterSubstitution(bindings=rest)


def memory_bound(alphabet: OrderedTypeAlphabet, n_params: int, depth: int, size: int) -> int:
    """
    Upper bound on the number of distinct systems the frontier can visit.

    Counts systems of at most ``size`` inequations between types of depth
    <= ``depth`` over ``n_params`` parameters.
    """
    n0, n1 = len(alphabet.nullary), len(alphabet.unary)
    types = n_params
    for level in range(1, depth + 1):
        types += n0 * n1 ** (level - 1) + n_params * n1 ** level
    pairs = types * types
    return sum(math.comb(pairs, i) for i in range(size + 1))


# =============================================================================
# Frontier loop
# =============================================================================

def _witness_chain(
    parents: Dict[Tuple[str, ...], Tuple[Tuple[str, ...], ParameterSubstitution]],
    root: Tuple[str, ...],
) -> ParameterSubstitution:
    """Φ1 ∘ ... ∘ Φg along the parent links from the root to the empty system."""
    chain: list[ParameterSubstitution] = []
    key: Tuple[str, ...] = ()
    while key != root:
        key, phi = parents[key]
        chain.append(phi)
    chain.reverse()
    return reduce(compose, chain, ParameterSubstitution())


def solve(
    raw: InequationSystem,
    alphabet: OrderedTypeAlphabet,
    *,
    verify: bool = True,
    max_generations: Optional[int] = None,
    on_generation: Optional[GenerationCallback] = None,
) -> SolveResult:
    """
    Decide solvability of ``raw`` and return a witness when it is solvable.

    Args:
        raw: System to solve (any canonical system over the alphabet)
        alphabet: Validated alphabet with constructors of arity <= 1
        verify: Re-check the witness against ``raw`` before returning
        max_generations: Optional cap on frontier rounds
        on_generation: Called with (generation, frontier size) after each round

    Returns:
        SolveResult; when solvable, the least depth d of a closed solution
        binding every parameter satisfies generations <= d <= generations + 1

    Raises:
        PolysubError: UNSUPPORTED_ARITY, CONFIG_ERROR when ``max_generations``
            is exceeded, INTERNAL_WITNESS_FAILURE if the witness does not verify
    """
    require_unary_alphabet(alphabet)

    normalized = nf_system(raw, alphabet)
    if normalized is FALSE_SYSTEM:
        logger.info("solve_complete", verdict=False, generations=0, reason="false_member")
        return SolveResult(verdict=False)
    assert isinstance(normalized, InequationSystem)
    if normalized.is_empty:
        logger.info("solve_complete", verdict=True, generations=0, reason="trivially_true")
        return SolveResult(verdict=True, witness=ParameterSubstitution())

    memory: set[Tuple[str, ...]] = {normalized.key}
    parents: Dict[Tuple[str, ...], Tuple[Tuple[str, ...], ParameterSubstitution]] = {}
    frontier = [normalized]
    generation = 0
    explored = 0
    sizes: list[int] = []

    while True:
        if max_generations is not None and generation >= max_generations:
            raise PolysubError(
                ErrorCode.CONFIG_ERROR,
                f"solver stopped after max_generations={max_generations}",
                details={"max_generations": max_generations},
            )

        discovered: Dict[Tuple[str, ...], InequationSystem] = {}
        for system in frontier:
            explored += 1
            for child, phi in inst(system, alphabet):
                if child.key in memory or child.key in discovered:
                    continue
                discovered[child.key] = child
                parents[child.key] = (system.key, phi)

        generation += 1
        sizes.append(len(discovered))
        logger.debug(
            "frontier_generation",
            generation=generation,
            size=len(discovered),
            memory=len(memory),
        )
        if on_generation is not None:
            on_generation(generation, len(discovered))

        stats = SolveStats(
            generations=generation,
            systems_explored=explored,
            memory_size=len(memory),
            frontier_sizes=sizes,
        )

        if () in discovered:
            witness = restrict(_witness_chain(parents, normalized.key), raw.params)
            if verify and not verify_witness(raw, witness, alphabet):
                logger.error("witness_verification_failed", witness=str(witness))
                raise PolysubError(
                    ErrorCode.INTERNAL_WITNESS_FAILURE,
                    f"composed witness {witness} does not solve the input system",
                    details={"witness": witness.to_strings()},
                )
            logger.info("solve_complete", verdict=True, **stats.summary())
            return SolveResult(verdict=True, witness=witness, stats=stats)

        if not discovered:
            logger.info("solve_complete", verdict=False, **stats.summary())
            return SolveResult(verdict=False, stats=stats)

        memory.update(discovered)
        frontier = [discovered[key] for key in sorted(discovered)]
