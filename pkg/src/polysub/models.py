"""
Core data models for the polysub typability checker.

All value types are defined here so that the type algebra, constraint
generation, the solver, the oracle and the CLI share one representation.
Every model is frozen; types, inequations and systems cache their
canonical text on construction and use it for hashing, equality and
ordering.
"""

from __future__ import annotations

from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Tuple, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    field_validator,
    model_validator,
)

# =============================================================================
# Errors
# =============================================================================


class ErrorCode(str, Enum):
    """Machine-readable failure categories surfaced by every stage."""
    UNKNOWN_CONSTRUCTOR = "UNKNOWN_CONSTRUCTOR"
    DUPLICATE_CONSTRUCTOR = "DUPLICATE_CONSTRUCTOR"
    ORDER_CYCLE = "ORDER_CYCLE"
    INCOMPATIBLE = "INCOMPATIBLE"
    NO_NULLARY = "NO_NULLARY"
    UNKNOWN_SYMBOL = "UNKNOWN_SYMBOL"
    ARITY_MISMATCH = "ARITY_MISMATCH"
    UNBOUND_VARIABLE = "UNBOUND_VARIABLE"
    UNSUPPORTED_ARITY = "UNSUPPORTED_ARITY"
    BUDGET_EXCEEDED = "BUDGET_EXCEEDED"
    INTERNAL_WITNESS_FAILURE = "INTERNAL_WITNESS_FAILURE"
    PARSE_ERROR = "PARSE_ERROR"
    CONFIG_ERROR = "CONFIG_ERROR"
    ORACLE_DISAGREEMENT = "ORACLE_DISAGREEMENT"
    INPUT_TOO_DEEP = "INPUT_TOO_DEEP"


class PolysubError(Exception):
    """
    Base error for all polysub failures.

    Carries an ErrorCode, an optional source location (1-based line and
    column in a problem file) and structured details such as the witness
    triple of an incompatible alphabet.
    """

    def __init__(
        self,
        code: ErrorCode,
        message: str,
        *,
        line: int | None = None,
        column: int | None = None,
        details: dict[str, Any] | None = None,
    ):
        super().__init__(message)
        self.code = code
        self.message = message
        self.line = line
        self.column = column
        self.details: dict[str, Any] = dict(details or {})

    def located(self, line: int | None, column: int | None) -> PolysubError:
        """Attach a source location unless one is already present."""
        if self.line is None and line is not None:
            self.line = line
            self.column = column
        return self

    def to_dict(self) -> dict[str, Any]:
        return {
            "code": self.code.value,
            "message": self.message,
            "line": self.line,
            "column": self.column,
            "details": self.details,
        }

    def __str__(self) -> str:
        where = f" (line {self.line}, column {self.column})" if self.line is not None else ""
        return f"{self.code.value}: {self.message}{where}"


# =============================================================================
# Types
# =============================================================================


class TypeConstructor(BaseModel):
    """A type constructor K with its arity #K."""
    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1, description="Constructor name, unique within an alphabet")
    arity: int = Field(ge=0, description="Number of type arguments")

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


class Parameter(BaseModel):
    """A type parameter, rendered with a leading apostrophe."""
    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1, description="Parameter identifier")

    _text: str = PrivateAttr(default="")

    def model_post_init(self, __context: Any) -> None:
        self._text = "'" + self.name

    @property
    def depth(self) -> int:
        return 0

    @property
    def params(self) -> FrozenSet[str]:
        return frozenset((self.name,))

    def __hash__(self) -> int:
        return hash(self._text)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Parameter) and other._text == self._text

    def __str__(self) -> str:
        return self._text


class Application(BaseModel):
    """A constructor applied to exactly #K argument types."""
    model_config = ConfigDict(frozen=True)

    constructor: TypeConstructor = Field(description="Head constructor")
    args: Tuple[Type, ...] = Field(default=(), description="Argument types, one per arity slot")

    _text: str = PrivateAttr(default="")
    _depth: int = PrivateAttr(default=1)
    _params: FrozenSet[str] = PrivateAttr(default=frozenset())

    @model_validator(mode="after")
    def _check_arity(self) -> Application:
        if len(self.args) != self.constructor.arity:
            raise ValueError(
                f"{self.constructor.name} expects {self.constructor.arity} "
                f"argument(s), got {len(self.args)}"
            )
        return self

    def model_post_init(self, __context: Any) -> None:
        name = self.constructor.name
        if self.args:
            self._text = f"{name}({', '.join(str(a) for a in self.args)})"
            self._depth = 1 + max(a.depth for a in self.args)
            self._params = frozenset().union(*(a.params for a in self.args))
        else:
            self._text = name

    @property
    def name(self) -> str:
        return self.constructor.name

    @property
    def depth(self) -> int:
        return self._depth

    @property
    def params(self) -> FrozenSet[str]:
        return self._params

    def __hash__(self) -> int:
        return hash(self._text)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Application) and other._text == self._text

    def __str__(self) -> str:
        return self._text


Type = Union[Parameter, Application]
Application.model_rebuild()


class ParameterSubstitution(BaseModel):
    """
    Finite map from parameter names to types.

    Identity bindings are dropped on construction, so the keys of
    ``bindings`` are exactly dom(Θ).
    """
    model_config = ConfigDict(frozen=True)

    bindings: Dict[str, Type] = Field(default_factory=dict, description="Parameter images")

    @field_validator("bindings")
    @classmethod
    def _drop_identity_bindings(cls, value: Dict[str, Type]) -> Dict[str, Type]:
        return {
            name: value[name]
            for name in sorted(value)
            if not (isinstance(value[name], Parameter) and value[name].name == name)
        }

    @property
    def domain(self) -> FrozenSet[str]:
        return frozenset(self.bindings)

    @property
    def depth(self) -> int:
        return max((t.depth for t in self.bindings.values()), default=0)

    @property
    def params(self) -> FrozenSet[str]:
        """Par(Θ): parameters occurring in the images."""
        return frozenset().union(*(t.params for t in self.bindings.values()))

    @property
    def is_closed(self) -> bool:
        return not self.params

    def image(self, name: str) -> Type:
        bound = self.bindings.get(name)
        return bound if bound is not None else Parameter(name=name)

    def to_strings(self) -> dict[str, str]:
        return {name: str(t) for name, t in self.bindings.items()}

    def __str__(self) -> str:
        inner = ", ".join(f"'{name} := {t}" for name, t in self.bindings.items())
        return f"[{inner}]"


# =============================================================================
# Ordered type alphabet
# =============================================================================


class OrderedTypeAlphabet(BaseModel):
    """
    Constructors with arities and a compatible partial order.

    Instances are produced by ``core.validate_alphabet``; ``order`` holds
    the reflexive-transitive closure of the declared pairs.
    """
    model_config = ConfigDict(frozen=True)

    constructors: Tuple[TypeConstructor, ...] = Field(description="Constructors in declaration order")
    order: FrozenSet[Tuple[str, str]] = Field(description="Closure of the constructor order")
    declared: Tuple[Tuple[str, str], ...] = Field(default=(), description="Generating pairs as written")

    _by_name: Dict[str, TypeConstructor] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context: Any) -> None:
        self._by_name = {c.name: c for c in self.constructors}

    def constructor(self, name: str) -> TypeConstructor:
        try:
            return self._by_name[name]
        except KeyError:
            raise PolysubError(
                ErrorCode.UNKNOWN_CONSTRUCTOR,
                f"type constructor '{name}' is not declared",
                details={"name": name},
            ) from None

    def has(self, name: str) -> bool:
        return name in self._by_name

    def leq(self, lower: str, upper: str) -> bool:
        return (lower, upper) in self.order

    @property
    def names(self) -> List[str]:
        return [c.name for c in self.constructors]

    @property
    def nullary(self) -> List[TypeConstructor]:
        return [c for c in self.constructors if c.arity == 0]

    @property
    def unary(self) -> List[TypeConstructor]:
        return [c for c in self.constructors if c.arity == 1]


# =============================================================================
# Terms, signatures, assignments
# =============================================================================


class Var(BaseModel):
    """A term variable."""
    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1)

    def __hash__(self) -> int:
        return hash(("var", self.name))

    def __str__(self) -> str:
        return self.name


class App(BaseModel):
    """A function symbol applied to argument terms (constants have none)."""
    model_config = ConfigDict(frozen=True)

    fn: str = Field(min_length=1)
    args: Tuple[Term, ...] = ()

    _text: str = PrivateAttr(default="")

    def model_post_init(self, __context: Any) -> None:
        if self.args:
            self._text = f"{self.fn}({', '.join(str(a) for a in self.args)})"
        else:
            self._text = self.fn

    def __hash__(self) -> int:
        return hash(("app", self._text))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, App) and other._text == self._text

    def __str__(self) -> str:
        return self._text


Term = Union[Var, App]
App.model_rebuild()


class Signature(BaseModel):
    """f : σ1 × ... × σn → σ; parameters are local to each use."""
    model_config = ConfigDict(frozen=True)

    fn: str = Field(min_length=1)
    domain: Tuple[Type, ...] = Field(default=(), description="Argument types")
    codomain: Type = Field(description="Result type")

    @property
    def arity(self) -> int:
        return len(self.domain)

    @property
    def params(self) -> FrozenSet[str]:
        return frozenset().union(self.codomain.params, *(t.params for t in self.domain))

    def __str__(self) -> str:
        if not self.domain:
            return f"{self.fn} : {self.codomain}"
        return f"{self.fn} : {' * '.join(str(t) for t in self.domain)} -> {self.codomain}"


class TypeAssignment(BaseModel):
    """Γ: finite map from term variables to types."""
    model_config = ConfigDict(frozen=True)

    bindings: Dict[str, Type] = Field(default_factory=dict)

    @property
    def variables(self) -> FrozenSet[str]:
        return frozenset(self.bindings)

    @property
    def params(self) -> FrozenSet[str]:
        return frozenset().union(*(t.params for t in self.bindings.values()))

    def to_strings(self) -> dict[str, str]:
        return {name: str(self.bindings[name]) for name in sorted(self.bindings)}

    def __str__(self) -> str:
        return "{" + ", ".join(f"{k} : {v}" for k, v in self.to_strings().items()) + "}"


# =============================================================================
# Inequations and systems
# =============================================================================


class TypeInequation(BaseModel):
    """lhs ⪯ rhs, solved by Θ iff lhs·Θ ≤ rhs·Θ."""
    model_config = ConfigDict(frozen=True)

    lhs: Type
    rhs: Type

    _text: str = PrivateAttr(default="")

    def model_post_init(self, __context: Any) -> None:
        self._text = f"{self.lhs} <= {self.rhs}"

    @property
    def depth(self) -> int:
        return max(self.lhs.depth, self.rhs.depth)

    @property
    def params(self) -> FrozenSet[str]:
        return self.lhs.params | self.rhs.params

    def __hash__(self) -> int:
        return hash(self._text)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TypeInequation) and other._text == self._text

    def __str__(self) -> str:
        return self._text


class InequationSystem(BaseModel):
    """
    A set of inequations in canonical form.

    Duplicates are removed and members sorted by their rendered text, so
    two systems are equal iff their ``key`` tuples are equal.
    """
    model_config = ConfigDict(frozen=True)

    inequations: Tuple[TypeInequation, ...] = ()

    _key: Tuple[str, ...] = PrivateAttr(default=())

    @field_validator("inequations")
    @classmethod
    def _canonical(cls, value: Tuple[TypeInequation, ...]) -> Tuple[TypeInequation, ...]:
        unique = {str(i): i for i in value}
        return tuple(unique[text] for text in sorted(unique))

    def model_post_init(self, __context: Any) -> None:
        self._key = tuple(str(i) for i in self.inequations)

    @classmethod
    def of(cls, *inequations: TypeInequation) -> InequationSystem:
        return cls(inequations=inequations)

    @property
    def key(self) -> Tuple[str, ...]:
        return self._key

    @property
    def size(self) -> int:
        return len(self.inequations)

    @property
    def is_empty(self) -> bool:
        return not self.inequations

    @property
    def depth(self) -> int:
        return max((i.depth for i in self.inequations), default=0)

    @property
    def params(self) -> FrozenSet[str]:
        return frozenset().union(*(i.params for i in self.inequations))

    def __hash__(self) -> int:
        return hash(self._key)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, InequationSystem) and other._key == self._key

    def __str__(self) -> str:
        return "{" + ", ".join(self._key) + "}"


class Truth(str, Enum):
    """Constant outcomes of normalizing a single inequation."""
    TRUE = "true"
    FALSE = "false"


class SystemMarker(str, Enum):
    """Distinguished normal form of a system containing an unsatisfiable member."""
    FALSE_SYSTEM = "false_system"


FALSE_SYSTEM = SystemMarker.FALSE_SYSTEM

NormalizedInequation = Union[TypeInequation, Truth]


# =============================================================================
# Solver and oracle results
# =============================================================================


class SolveStats(BaseModel):
    """Frontier statistics of one solver run."""
    model_config = ConfigDict(frozen=True)

    generations: int = Field(default=0, ge=0, description="Inst rounds performed")
    systems_explored: int = Field(default=0, ge=0, description="Systems expanded with Inst")
    memory_size: int = Field(default=0, ge=0, description="Size of the memory set at exit")
    frontier_sizes: List[int] = Field(default_factory=list, description="|A_n| for n >= 1")

    def summary(self) -> dict[str, int]:
        return {
            "generations": self.generations,
            "systems_explored": self.systems_explored,
            "memory_size": self.memory_size,
        }


class SolveResult(BaseModel):
    """Verdict of the frontier loop plus a verified witness when solvable."""
    model_config = ConfigDict(frozen=True)

    verdict: bool
    witness: Optional[ParameterSubstitution] = None
    stats: SolveStats = Field(default_factory=SolveStats)

    @model_validator(mode="after")
    def _witness_iff_solvable(self) -> SolveResult:
        if self.verdict != (self.witness is not None):
            raise ValueError("witness must be present exactly when the verdict is true")
        return self


class OracleBudget(BaseModel):
    """Bounds for the brute-force reference checks."""
    model_config = ConfigDict(frozen=True)

    max_depth: int = Field(default=3, ge=1, description="Monotype enumeration bound")
    max_candidates: int = Field(default=2_000_000, ge=1, description="Cap on enumerated assignments")


# =============================================================================
# Problems and command reports
# =============================================================================


class Problem(BaseModel):
    """A parsed problem file with all names resolved."""
    model_config = ConfigDict(frozen=True)

    alphabet: OrderedTypeAlphabet
    signatures: Dict[str, Signature] = Field(default_factory=dict)
    term: Optional[Term] = None
    system: Optional[InequationSystem] = None
    pair: Optional[Tuple[Type, Type]] = None

    @model_validator(mode="after")
    def _single_payload(self) -> Problem:
        present = [p for p in (self.term, self.system, self.pair) if p is not None]
        if len(present) > 1:
            raise ValueError("a problem carries at most one of term, solve and subtype sections")
        return self

    @property
    def payload(self) -> Term | InequationSystem | Tuple[Type, Type] | None:
        if self.term is not None:
            return self.term
        if self.system is not None:
            return self.system
        return self.pair


class ValidationReport(BaseModel):
    """Closure and compatibility verdict of an alphabet."""
    model_config = ConfigDict(frozen=True)

    constructors: List[str]
    order: List[Tuple[str, str]]

    def to_document(self, schema: int) -> dict[str, Any]:
        return {
            "schema": schema,
            "verdict": "valid",
            "constructors": self.constructors,
            "order": [list(pair) for pair in self.order],
        }


class SubtypeReport(BaseModel):
    """Answer to a σ ≤ τ query."""
    model_config = ConfigDict(frozen=True)

    lhs: str
    rhs: str
    holds: bool

    def to_document(self, schema: int) -> dict[str, Any]:
        return {
            "schema": schema,
            "verdict": "holds" if self.holds else "fails",
            "lhs": self.lhs,
            "rhs": self.rhs,
        }


class ConstraintReport(BaseModel):
    """ineq(Γ_init, t : τ_init) with the initial context."""
    model_config = ConfigDict(frozen=True)

    term: str
    assignment: Dict[str, str]
    type: str
    inequations: List[str]

    def to_document(self, schema: int) -> dict[str, Any]:
        return {
            "schema": schema,
            "term": self.term,
            "assignment": self.assignment,
            "type": self.type,
            "inequations": self.inequations,
        }


class SolveReport(BaseModel):
    """Outcome of ``solve`` on a raw system."""
    model_config = ConfigDict(frozen=True)

    solvable: bool
    witness: Optional[Dict[str, str]] = None
    stats: SolveStats
    oracle_verdict: Optional[bool] = None

    def to_document(self, schema: int, trace: bool = False) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "schema": schema,
            "verdict": "solvable" if self.solvable else "unsolvable",
        }
        if self.witness is not None:
            doc["witness"] = self.witness
        doc["stats"] = self.stats.summary()
        if trace:
            doc["trace"] = self.stats.frontier_sizes
        if self.oracle_verdict is not None:
            doc["oracle"] = "solvable" if self.oracle_verdict else "unsolvable"
        return doc


class CheckReport(BaseModel):
    """Outcome of the full typability pipeline for a term."""
    model_config = ConfigDict(frozen=True)

    typable: bool
    type: Optional[str] = None
    assignment: Optional[Dict[str, str]] = None
    witness: Optional[Dict[str, str]] = None
    stats: SolveStats
    oracle_verdict: Optional[bool] = None

    def to_document(self, schema: int, trace: bool = False) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "schema": schema,
            "verdict": "typable" if self.typable else "untypable",
        }
        if self.typable:
            doc["type"] = self.type
            doc["assignment"] = self.assignment
            doc["witness"] = self.witness
        doc["stats"] = self.stats.summary()
        if trace:
            doc["trace"] = self.stats.frontier_sizes
        if self.oracle_verdict is not None:
            doc["oracle"] = "typable" if self.oracle_verdict else "untypable"
        return doc
