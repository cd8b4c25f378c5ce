"""polysub - Typability for inclusion and parametric polymorphism.

This package decides whether a first-order term is typable over an ordered
alphabet of at most unary type constructors, by generating type
inequations and solving them with a bounded frontier search.
"""

__version__ = "0.1.0"
__author__ = "polysub maintainers"

from polysub.core import subtype, validate_alphabet
from polysub.infer import constraints_for, gen_constraints, init_context, verify_witness
from polysub.models import PolysubError
from polysub.parser import parse_problem, parse_problem_file
from polysub.solver import solve

__all__ = [
    "__version__",
    "__author__",
    "PolysubError",
    "constraints_for",
    "gen_constraints",
    "init_context",
    "parse_problem",
    "parse_problem_file",
    "solve",
    "subtype",
    "validate_alphabet",
    "verify_witness",
]
