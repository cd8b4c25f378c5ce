"""
Unit tests for the brute-force oracle.
"""

import sys
from pathlib import Path

import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from polysub.models import (
    App,
    ErrorCode,
    InequationSystem,
    OracleBudget,
    PolysubError,
    TypeAssignment,
    Var,
)
from polysub.oracle import (
    DerivationSearch,
    brute_solvable,
    brute_typable,
    derives,
    enum_monotypes,
    min_solution_depth,
)

# ============================================================================
# Test enum_monotypes
# ============================================================================


class TestEnumMonotypes:
    """Tests for bounded monotype enumeration."""

    def test_depth_one(self, r_alphabet):
        assert [str(t) for t in enum_monotypes(r_alphabet, 1)] == ["nat", "int"]

    def test_depth_two(self, r_alphabet):
        assert [str(t) for t in enum_monotypes(r_alphabet, 2)] == [
            "nat", "int", "list(nat)", "list(int)", "set(nat)", "set(int)",
        ]

    def test_depth_zero(self, r_alphabet):
        assert enum_monotypes(r_alphabet, 0) == []

    def test_count(self, r_alphabet):
        """2 + 4 + 8 monotypes up to depth 3."""
        assert len(enum_monotypes(r_alphabet, 3)) == 14

    def test_nullary_only(self, nat_only):
        assert [str(t) for t in enum_monotypes(nat_only, 5)] == ["nat"]


# ============================================================================
# Test brute_solvable
# ============================================================================


class TestBruteSolvable:
    """Tests for ⋄_k on systems."""

    def test_empty_system_at_zero(self, r_alphabet):
        assert brute_solvable(InequationSystem(), 0, r_alphabet)

    def test_parameters_need_depth(self, r_alphabet, T):
        system = T.system(T.le(T.p("a"), T("nat")))
        assert not brute_solvable(system, 0, r_alphabet)
        assert brute_solvable(system, 1, r_alphabet)

    def test_closed_false(self, r_alphabet, T):
        assert not brute_solvable(T.system(T.le(T("int"), T("nat"))), 3, r_alphabet)

    def test_unsolvable(self, r_alphabet, T):
        system = T.system(T.le(T.p("a"), T("nat")), T.le(T("int"), T.p("a")))
        assert not brute_solvable(system, 3, r_alphabet)

    def test_monotone_in_depth(self, r_alphabet, T):
        system = T.system(T.le(T("list", T("nat")), T.p("a")))
        found = [brute_solvable(system, k, r_alphabet) for k in range(4)]
        assert found == [False, False, True, True]

    def test_budget_exceeded(self, r_alphabet, T):
        system = T.system(T.le(T.p("a"), T.p("b")))
        with pytest.raises(PolysubError) as exc_info:
            brute_solvable(system, 3, r_alphabet, OracleBudget(max_candidates=100))
        assert exc_info.value.code is ErrorCode.BUDGET_EXCEEDED
        assert exc_info.value.details["candidates"] == 14 ** 2


class TestMinSolutionDepth:
    """Tests for the least solving depth."""

    def test_two(self, r_alphabet, T):
        system = T.system(T.le(T("list", T("nat")), T.p("a")))
        assert min_solution_depth(system, r_alphabet, 4) == 2

    def test_empty(self, r_alphabet):
        assert min_solution_depth(InequationSystem(), r_alphabet, 3) == 0

    def test_none(self, r_alphabet, T):
        system = T.system(T.le(T.p("a"), T("nat")), T.le(T("int"), T.p("a")))
        assert min_solution_depth(system, r_alphabet, 3) is None


# ============================================================================
# Test derivations
# ============================================================================


class TestDerives:
    """Tests for ground derivability Γ ⊢ t : τ."""

    def test_variable(self, r_alphabet, r_signatures, T):
        gamma = TypeAssignment(bindings={"x": T("nat")})
        assert derives(gamma, Var(name="x"), T("int"), r_signatures, r_alphabet)
        assert not derives(gamma, Var(name="x"), T("list", T("nat")), r_signatures, r_alphabet)

    def test_unbound_variable(self, r_alphabet, r_signatures, T):
        assert not derives(TypeAssignment(), Var(name="x"), T("nat"), r_signatures, r_alphabet)

    def test_subsumption_on_result(self, r_alphabet, r_signatures, T):
        t = App(fn="cons", args=(App(fn="zero"), App(fn="nil")))
        assert derives(TypeAssignment(), t, T("set", T("int")), r_signatures, r_alphabet)
        assert not derives(TypeAssignment(), t, T("list", T("set", T("nat"))), r_signatures, r_alphabet)

    def test_instances_cached(self, r_alphabet, r_signatures):
        search = DerivationSearch(r_signatures, r_alphabet, OracleBudget(max_depth=2))
        first = search.instances("cons")
        assert len(first) == 6
        assert search.instances("cons") is first

    def test_unknown_symbol(self, r_alphabet, r_signatures, T):
        with pytest.raises(PolysubError) as exc_info:
            derives(TypeAssignment(), App(fn="g"), T("nat"), r_signatures, r_alphabet)
        assert exc_info.value.code is ErrorCode.UNKNOWN_SYMBOL

    def test_arity_mismatch(self, r_alphabet, r_signatures, T):
        t = App(fn="s", args=(App(fn="zero"), App(fn="zero")))
        with pytest.raises(PolysubError) as exc_info:
            derives(TypeAssignment(), t, T("nat"), r_signatures, r_alphabet)
        assert exc_info.value.code is ErrorCode.ARITY_MISMATCH


class TestBruteTypable:
    """Tests for bounded typability."""

    def test_cons_zero_nil(self, r_alphabet, r_signatures):
        t = App(fn="cons", args=(App(fn="zero"), App(fn="nil")))
        assert brute_typable(t, r_signatures, r_alphabet)

    def test_cons_zero_zero(self, r_alphabet, r_signatures):
        t = App(fn="cons", args=(App(fn="zero"), App(fn="zero")))
        assert not brute_typable(t, r_signatures, r_alphabet)

    def test_variable_at_depth_one(self, r_alphabet, r_signatures):
        assert brute_typable(Var(name="x"), r_signatures, r_alphabet, OracleBudget(max_depth=1))

    def test_shared_variable(self, r_alphabet, r_signatures):
        """x must be both a nat and a list."""
        t = App(fn="cons", args=(App(fn="s", args=(Var(name="x"),)), Var(name="x")))
        assert not brute_typable(t, r_signatures, r_alphabet, OracleBudget(max_depth=2))

    def test_budget_exceeded(self, r_alphabet, r_signatures):
        t = App(fn="cons", args=(Var(name="x"), Var(name="y")))
        with pytest.raises(PolysubError) as exc_info:
            brute_typable(t, r_signatures, r_alphabet, OracleBudget(max_depth=3, max_candidates=1000))
        assert exc_info.value.code is ErrorCode.BUDGET_EXCEEDED
