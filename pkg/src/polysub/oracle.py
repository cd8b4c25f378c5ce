"""
Brute-force reference checks.

Exponential enumerations over bounded-depth monotypes that decide the
same questions as the solver and the constraint pipeline. They are used
by the ``--oracle`` cross-check and by the test sweeps, never on the
production path.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping
from typing import Dict, List, Optional, Tuple

import structlog

from polysub.core import apply_subst, subtype
from polysub.infer import term_variables, verify_witness
from polysub.models import (
    App,
    Application,
    ErrorCode,
    InequationSystem,
    OracleBudget,
    OrderedTypeAlphabet,
    ParameterSubstitution,
    PolysubError,
    Signature,
    Term,
    Type,
    TypeAssignment,
    Var,
)
from polysub.solver import require_unary_alphabet

logger = structlog.get_logger()


def _check_budget(candidates: int, budget: OracleBudget, what: str) -> None:
    if candidates > budget.max_candidates:
        raise PolysubError(
            ErrorCode.BUDGET_EXCEEDED,
            f"{what} needs {candidates} candidates, budget is {budget.max_candidates}",
            details={"candidates": candidates, "max_candidates": budget.max_candidates},
        )


def enum_monotypes(alphabet: OrderedTypeAlphabet, k: int) -> List[Type]:
    """
    All monotypes of depth <= k, shallowest first.

    Depth 1 is the nullary constructors in declaration order; each further
    level wraps every type of the previous level in each unary constructor.
    """
    require_unary_alphabet(alphabet)
    if k <= 0:
        return []
    level: List[Type] = [Application(constructor=c) for c in alphabet.nullary]
    result = list(level)
    for _ in range(k - 1):
        level = [
            Application(constructor=c, args=(t,))
            for c in alphabet.unary
            for t in level
        ]
        result.extend(level)
    return result


def brute_solvable(
    system: InequationSystem,
    k: int,
    alphabet: OrderedTypeAlphabet,
    budget: Optional[OracleBudget] = None,
) -> bool:
    """
    ⋄_k I: some closed Φ with dom(Φ) = Par(I) and depth(Φ) <= k solves I.

    Raises:
        PolysubError: BUDGET_EXCEEDED when |monotypes|^|Par(I)| is too large
    """
    budget = budget or OracleBudget()
    names = sorted(system.params)
    if not names:
        return verify_witness(system, ParameterSubstitution(), alphabet)

    monotypes = enum_monotypes(alphabet, k)
    _check_budget(len(monotypes) ** len(names), budget, "brute_solvable")

    for images in itertools.product(monotypes, repeat=len(names)):
        phi = ParameterSubstitution(bindings=dict(zip(names, images)))
        if verify_witness(system, phi, alphabet):
            return True
    return False


def min_solution_depth(
    system: InequationSystem,
    alphabet: OrderedTypeAlphabet,
    max_k: int,
    budget: Optional[OracleBudget] = None,
) -> Optional[int]:
    """Least k <= max_k with ⋄_k I, or None."""
    for k in range(max_k + 1):
        if brute_solvable(system, k, alphabet, budget):
            return k
    return None


class DerivationSearch:
    """
    Ground derivability Γ ⊢ t : τ over bounded signature instances.

    A variable needs Γ(x) <= τ. An application f(t1..tn) needs some
    instance σ1 × ... × σn → σ of f's signature, its parameters bound to
    monotypes of depth <= ``budget.max_depth``, with σ <= τ and Γ ⊢ ti : σi
    for every argument. Instances are chosen independently at every node.
    """

    def __init__(
        self,
        signatures: Mapping[str, Signature],
        alphabet: OrderedTypeAlphabet,
        budget: Optional[OracleBudget] = None,
    ):
        self.signatures = signatures
        self.alphabet = alphabet
        self.budget = budget or OracleBudget()
        self.monotypes = enum_monotypes(alphabet, self.budget.max_depth)
        self._instances: Dict[str, Tuple[Signature, ...]] = {}

    def instances(self, fn: str) -> Tuple[Signature, ...]:
        """Every instance of fn's signature over the enumerated monotypes."""
        cached = self._instances.get(fn)
        if cached is not None:
            return cached

        signature = self.signatures.get(fn)
        if signature is None:
            raise PolysubError(
                ErrorCode.UNKNOWN_SYMBOL,
                f"function symbol '{fn}' has no signature",
                details={"name": fn},
            )
        names = sorted(signature.params)
        _check_budget(len(self.monotypes) ** len(names), self.budget, f"instances of '{fn}'")

        found = []
        for images in itertools.product(self.monotypes, repeat=len(names)):
            theta = ParameterSubstitution(bindings=dict(zip(names, images)))
            found.append(
                Signature(
                    fn=fn,
                    domain=tuple(apply_subst(theta, s) for s in signature.domain),
                    codomain=apply_subst(theta, signature.codomain),
                )
            )
        self._instances[fn] = tuple(found)
        return self._instances[fn]

    def derives(self, gamma: TypeAssignment, t: Term, tau: Type) -> bool:
        memo: Dict[Tuple[Term, Type], bool] = {}

        def check(node: Term, target: Type) -> bool:
            key = (node, target)
            if key in memo:
                return memo[key]
            if isinstance(node, Var):
                bound = gamma.bindings.get(node.name)
                result = bound is not None and subtype(self.alphabet, bound, target)
            else:
                result = any(
                    subtype(self.alphabet, instance.codomain, target)
                    and all(check(arg, s) for arg, s in zip(node.args, instance.domain))
                    for instance in self._checked_instances(node)
                )
            memo[key] = result
            return result

        return check(t, tau)

    def _checked_instances(self, node: App) -> Tuple[Signature, ...]:
        found = self.instances(node.fn)
        arity = self.signatures[node.fn].arity
        if len(node.args) != arity:
            raise PolysubError(
                ErrorCode.ARITY_MISMATCH,
                f"'{node.fn}' takes {arity} argument(s), got {len(node.args)}",
                details={"name": node.fn, "expected": arity, "actual": len(node.args)},
            )
        return found


def derives(
    gamma: TypeAssignment,
    t: Term,
    tau: Type,
    signatures: Mapping[str, Signature],
    alphabet: OrderedTypeAlphabet,
    budget: Optional[OracleBudget] = None,
) -> bool:
    """Γ ⊢ t : τ, see DerivationSearch."""
    return DerivationSearch(signatures, alphabet, budget).derives(gamma, t, tau)


def brute_typable(
    t: Term,
    signatures: Mapping[str, Signature],
    alphabet: OrderedTypeAlphabet,
    budget: Optional[OracleBudget] = None,
) -> bool:
    """
    Some Γ over Var(t) and some τ, all monotypes of depth <= max_depth,
    with Γ ⊢ t : τ.

    Raises:
        PolysubError: BUDGET_EXCEEDED when the (Γ, τ) space is too large
    """
    search = DerivationSearch(signatures, alphabet, budget)
    monotypes = search.monotypes
    variables = sorted(term_variables(t))
    _check_budget(len(monotypes) ** (len(variables) + 1), search.budget, "brute_typable")

    for images in itertools.product(monotypes, repeat=len(variables)):
        gamma = TypeAssignment(bindings=dict(zip(variables, images)))
        if any(search.derives(gamma, t, tau) for tau in monotypes):
            logger.debug("oracle_typable", term=str(t), assignment=gamma.to_strings())
            return True

    logger.debug(
        "oracle_untypable",
        term=str(t),
        candidates=len(monotypes) ** (len(variables) + 1),
    )
    return False
