"""
Constraint Generation

Reduces "is the term t typable?" to solvability of a system of type
inequations. The most general context gives every variable of t its own
parameter and t itself a further parameter; ineq then walks the term:

    ineq(Γ, x : τ)             = { Γ(x) ⪯ τ }
    ineq(Γ, f(s1..sn) : τ)     = { σ ⪯ τ } ∪ ⋃ ineq(Γ, si : σi)

where σ1 × ... × σn → σ is the signature of f with its parameters renamed
apart. Renamed parameters are spelled ``name#k`` with k drawn from one
shared counter, a spelling the problem-file syntax cannot produce. An
index is skipped when it would reproduce a parameter of Γ or τ.
"""

from __future__ import annotations

import itertools
import threading
from collections.abc import Mapping

import structlog

from polysub.core import apply_subst, subtype
from polysub.models import (
    App,
    ErrorCode,
    InequationSystem,
    OrderedTypeAlphabet,
    Parameter,
    ParameterSubstitution,
    PolysubError,
    Signature,
    Term,
    Type,
    TypeAssignment,
    TypeInequation,
    Var,
)

logger = structlog.get_logger()


class FreshNames:
    """Serialized counter handing out parameter names of the form ``base#k``."""

    def __init__(self, start: int = 1):
        self._counter = itertools.count(start)
        self._lock = threading.Lock()

    def next_index(self) -> int:
        with self._lock:
            return next(self._counter)

    def fresh(self, base: str) -> str:
        return f"{base}#{self.next_index()}"


def term_variables(t: Term) -> frozenset[str]:
    """Var(t)."""
    found: set[str] = set()
    stack: list[Term] = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            found.add(node.name)
        else:
            stack.extend(node.args)
    return frozenset(found)


def term_size(t: Term) -> int:
    """Number of nodes: variable occurrences plus applications."""
    size = 0
    stack: list[Term] = [t]
    while stack:
        node = stack.pop()
        size += 1
        if isinstance(node, App):
            stack.extend(node.args)
    return size


def init_context(t: Term, fresh: FreshNames | None = None) -> tuple[TypeAssignment, Parameter]:
    """
    Most general type assignment and result type for t.

    ``gen_constraints`` keeps its renamed parameters clear of the context,
    so the two calls may draw from separate ``fresh`` sources.
    """
    fresh = fresh or FreshNames()
    tau = Parameter(name=fresh.fresh("t"))
    gamma = TypeAssignment(
        bindings={x: Parameter(name=fresh.fresh(x)) for x in sorted(term_variables(t))}
    )
    return gamma, tau


def rename_signature(
    signature: Signature,
    fresh: FreshNames,
    reserved: frozenset[str] = frozenset(),
) -> Signature:
    """
    Copy of the signature whose parameters are all new.

    Indices whose renamed parameters would land in ``reserved`` are skipped.
    """
    names = sorted(signature.params)
    if not names:
        return signature
    index = fresh.next_index()
    while any(f"{name}#{index}" in reserved for name in names):
        index = fresh.next_index()
    renaming = ParameterSubstitution(
        bindings={name: Parameter(name=f"{name}#{index}") for name in names}
    )
    return Signature(
        fn=signature.fn,
        domain=tuple(apply_subst(renaming, t) for t in signature.domain),
        codomain=apply_subst(renaming, signature.codomain),
    )


def _collect(
    gamma: TypeAssignment,
    t: Term,
    tau: Type,
    signatures: Mapping[str, Signature],
    fresh: FreshNames,
    reserved: frozenset[str],
) -> list[TypeInequation]:
    out: list[TypeInequation] = []
    # pre-order, left to right, so renaming indices follow the term's text
    stack: list[tuple[Term, Type]] = [(t, tau)]
    while stack:
        node, expected = stack.pop()
        if isinstance(node, Var):
            bound = gamma.bindings.get(node.name)
            if bound is None:
                raise PolysubError(
                    ErrorCode.UNBOUND_VARIABLE,
                    f"variable '{node.name}' is not in the type assignment",
                    details={"name": node.name},
                )
            out.append(TypeInequation(lhs=bound, rhs=expected))
            continue

        signature = signatures.get(node.fn)
        if signature is None:
            raise PolysubError(
                ErrorCode.UNKNOWN_SYMBOL,
                f"function symbol '{node.fn}' has no signature",
                details={"name": node.fn},
            )
        if len(node.args) != signature.arity:
            raise PolysubError(
                ErrorCode.ARITY_MISMATCH,
                f"'{node.fn}' takes {signature.arity} argument(s), got {len(node.args)}",
                details={"name": node.fn, "expected": signature.arity, "actual": len(node.args)},
            )

        renamed = rename_signature(signature, fresh, reserved)
        out.append(TypeInequation(lhs=renamed.codomain, rhs=expected))
        stack.extend(reversed(list(zip(node.args, renamed.domain))))
    return out


def gen_constraints(
    gamma: TypeAssignment,
    t: Term,
    tau: Type,
    signatures: Mapping[str, Signature],
    fresh: FreshNames,
) -> InequationSystem:
    """
    ineq(Γ, t : τ).

    Renamed signature parameters avoid Par(Γ) ∪ Par(τ) whatever counter
    ``fresh`` is.

    Raises:
        PolysubError: UNKNOWN_SYMBOL, ARITY_MISMATCH or UNBOUND_VARIABLE
    """
    reserved = gamma.params | tau.params
    inequations = _collect(gamma, t, tau, signatures, fresh, reserved)
    system = InequationSystem(inequations=tuple(inequations))

    logger.debug(
        "constraints_generated",
        term=str(t),
        nodes=term_size(t),
        inequations=system.size,
    )

    return system


def constraints_for(
    t: Term,
    signatures: Mapping[str, Signature],
    fresh: FreshNames | None = None,
) -> tuple[TypeAssignment, Parameter, InequationSystem]:
    """(Γ_init, τ_init, ineq(Γ_init, t : τ_init)) with one shared name source."""
    fresh = fresh or FreshNames()
    gamma, tau = init_context(t, fresh)
    return gamma, tau, gen_constraints(gamma, t, tau, signatures, fresh)


def verify_witness(
    system: InequationSystem,
    theta: ParameterSubstitution,
    alphabet: OrderedTypeAlphabet,
) -> bool:
    """Θ ⊨ I: every inequation holds after substitution."""
    return all(
        subtype(alphabet, apply_subst(theta, i.lhs), apply_subst(theta, i.rhs))
        for i in system.inequations
    )
