"""
Shared pytest fixtures for polysub tests.

This module provides common fixtures used across test modules including:
- The R alphabet (nat, int, list, set) and its signature set
- Small helpers for building types, inequations and systems
- Problem-file fixture paths
"""

import logging
import sys
from pathlib import Path
from typing import Dict

import pytest
import structlog

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from polysub.core import validate_alphabet
from polysub.models import (
    Application,
    InequationSystem,
    OrderedTypeAlphabet,
    Parameter,
    Signature,
    TypeInequation,
)

R_PROBLEM_HEADER = """\
alphabet: nat/0, int/0, list/1, set/1
order: nat <= int, list <= set
signatures:
  zero : nat
  s    : nat -> nat
  nil  : list('a)
  cons : 'a * list('a) -> list('a)
"""


# ============================================================================
# Logging
# ============================================================================


def quiet_logging() -> None:
    """Warnings and errors only, printed to whatever stdout is current."""
    structlog.configure(
        wrapper_class=structlog.make_filtering_bound_logger(logging.WARNING),
        logger_factory=structlog.PrintLoggerFactory(),
        cache_logger_on_first_use=False,
    )


@pytest.fixture(autouse=True, scope="session")
def _quiet_logging():
    quiet_logging()
    yield


# ============================================================================
# Path Fixtures
# ============================================================================


@pytest.fixture
def fixtures_dir() -> Path:
    """Return path to test fixtures directory."""
    return Path(__file__).parent / "fixtures"


# ============================================================================
# Alphabet Fixtures
# ============================================================================


def make_r_alphabet() -> OrderedTypeAlphabet:
    return validate_alphabet(
        [("nat", 0), ("int", 0), ("list", 1), ("set", 1)],
        [("nat", "int"), ("list", "set")],
    )


def make_r_signatures(alphabet: OrderedTypeAlphabet) -> Dict[str, Signature]:
    nat = Application(constructor=alphabet.constructor("nat"))
    a = Parameter(name="a")
    list_a = Application(constructor=alphabet.constructor("list"), args=(a,))
    return {
        "zero": Signature(fn="zero", codomain=nat),
        "s": Signature(fn="s", domain=(nat,), codomain=nat),
        "nil": Signature(fn="nil", codomain=list_a),
        "cons": Signature(fn="cons", domain=(a, list_a), codomain=list_a),
    }


@pytest.fixture
def r_alphabet() -> OrderedTypeAlphabet:
    """nat <= int, list <= set."""
    return make_r_alphabet()


@pytest.fixture
def r_signatures(r_alphabet: OrderedTypeAlphabet) -> Dict[str, Signature]:
    """zero : nat, s : nat -> nat, nil : list('a), cons : 'a * list('a) -> list('a)."""
    return make_r_signatures(r_alphabet)


@pytest.fixture
def nat_only() -> OrderedTypeAlphabet:
    """A single nullary constructor."""
    return validate_alphabet([("nat", 0)])


# ============================================================================
# Builders
# ============================================================================


class TypeBuilder:
    """Shorthand for writing types over one alphabet in tests."""

    def __init__(self, alphabet: OrderedTypeAlphabet):
        self.alphabet = alphabet

    def __call__(self, name: str, *args):
        return Application(constructor=self.alphabet.constructor(name), args=tuple(args))

    @staticmethod
    def p(name: str) -> Parameter:
        return Parameter(name=name)

    @staticmethod
    def le(lhs, rhs) -> TypeInequation:
        return TypeInequation(lhs=lhs, rhs=rhs)

    @staticmethod
    def system(*inequations: TypeInequation) -> InequationSystem:
        return InequationSystem.of(*inequations)


@pytest.fixture
def T(r_alphabet: OrderedTypeAlphabet) -> TypeBuilder:
    """Type builder over the R alphabet."""
    return TypeBuilder(r_alphabet)
