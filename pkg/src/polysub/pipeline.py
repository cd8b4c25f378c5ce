"""
Pipeline Orchestrator

Coordinates the stages behind every command.

Processing flow for ``check``:
1. Problem file   - parsed and resolved (parser)
2. Context        - most general Γ_init and τ_init (infer)
3. Constraints    - ineq(Γ_init, t : τ_init) (infer)
4. Solve          - frontier loop with witness extraction (solver)
5. Result         - τ_init·Θ and Γ_init·Θ, re-verified against the system
6. Cross-check    - optional brute-force oracle (oracle)

``validate``, ``subtype``, ``gen`` and ``solve`` run prefixes of the same
flow.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Optional, cast

import structlog
import yaml  # type: ignore[import-untyped]
from pydantic import ValidationError

from polysub.core import apply_subst, apply_to_assignment, compose, grounding, restrict, subtype
from polysub.infer import FreshNames, constraints_for, verify_witness
from polysub.models import (
    CheckReport,
    ConstraintReport,
    ErrorCode,
    InequationSystem,
    OracleBudget,
    ParameterSubstitution,
    PolysubError,
    Problem,
    SolveReport,
    SolveResult,
    SubtypeReport,
    Term,
    ValidationReport,
)
from polysub.oracle import brute_solvable, brute_typable, derives
from polysub.solver import GenerationCallback, solve

logger = structlog.get_logger()

DEFAULT_LOG_LEVEL = "warning"


class OracleDisagreementError(PolysubError):
    """The solver and the brute-force oracle reached different verdicts."""

    def __init__(self, message: str, details: Optional[dict[str, Any]] = None):
        super().__init__(ErrorCode.ORACLE_DISAGREEMENT, message, details=details)


class EngineConfig:
    """Configuration container for the engine."""

    def __init__(self, config_path: Path | None = None):
        """
        Load configuration from a YAML file.

        Args:
            config_path: Path to settings.yaml; None uses built-in defaults

        Raises:
            PolysubError: CONFIG_ERROR if the file is missing or malformed
        """
        self.config: dict[str, Any] = {}

        if config_path is None:
            logger.info("using_default_config")
            return

        try:
            with open(config_path, encoding="utf-8") as f:
                loaded = yaml.safe_load(f) or {}
        except OSError as exc:
            raise PolysubError(
                ErrorCode.CONFIG_ERROR,
                f"cannot read config file {config_path}: {exc.strerror or exc}",
                details={"path": str(config_path)},
            ) from exc
        except yaml.YAMLError as exc:
            raise PolysubError(
                ErrorCode.CONFIG_ERROR,
                f"config file {config_path} is not valid YAML",
                details={"path": str(config_path), "reason": str(exc)},
            ) from exc

        if not isinstance(loaded, dict):
            raise PolysubError(
                ErrorCode.CONFIG_ERROR,
                f"config file {config_path} must contain a mapping",
                details={"path": str(config_path)},
            )
        self.config = loaded
        logger.info("config_loaded", path=str(config_path))

    def _section(self, name: str) -> dict[str, Any]:
        section = self.config.get(name) or {}
        if not isinstance(section, dict):
            raise PolysubError(
                ErrorCode.CONFIG_ERROR,
                f"config section '{name}' must be a mapping",
                details={"section": name},
            )
        return cast(dict[str, Any], section)

    @property
    def solver(self) -> dict[str, Any]:
        """Solver options: verify_witness, max_generations."""
        section = {"verify_witness": True, "max_generations": None}
        section.update(self._section("solver"))
        cap = section["max_generations"]
        if cap is not None and (not isinstance(cap, int) or isinstance(cap, bool) or cap < 1):
            raise PolysubError(
                ErrorCode.CONFIG_ERROR,
                "solver.max_generations must be a positive integer or null",
                details={"max_generations": cap},
            )
        return section

    @property
    def oracle(self) -> OracleBudget:
        """Oracle enumeration bounds."""
        try:
            return OracleBudget(**self._section("oracle"))
        except ValidationError as exc:
            raise PolysubError(
                ErrorCode.CONFIG_ERROR,
                "invalid oracle configuration",
                details={"errors": [e["msg"] for e in exc.errors()]},
            ) from exc

    @property
    def output(self) -> dict[str, Any]:
        """Report options: schema_version, indent."""
        section = {"schema_version": 1, "indent": 2}
        section.update(self._section("output"))
        return section

    @property
    def log_level(self) -> str:
        level = self._section("logging").get("level", DEFAULT_LOG_LEVEL)
        return str(level).lower()


def close_witness(
    theta: ParameterSubstitution,
    system: InequationSystem,
    problem: Problem,
) -> ParameterSubstitution:
    """
    Θ completed to a closed substitution on Par(system).

    Parameters Θ leaves unbound or still mentions are grounded with the
    first nullary constructor; the result solves whatever Θ solves.
    """
    residual = (system.params - theta.domain) | theta.params
    if not residual:
        return theta
    closed = compose(theta, grounding(sorted(residual), problem.alphabet))
    return restrict(closed, system.params)


class TypingPipeline:
    """
    Main orchestrator for the typability checker.

    Each command method takes a parsed Problem and returns a report model;
    failures are raised as PolysubError and mapped to exit codes by the CLI.
    """

    def __init__(self, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        self.schema_version: int = int(self.config.output["schema_version"])

        logger.debug(
            "pipeline_initialized",
            verify_witness=self.config.solver["verify_witness"],
            max_generations=self.config.solver["max_generations"],
        )

    # -- payload access ------------------------------------------------------

    @staticmethod
    def _missing(command: str, section: str) -> PolysubError:
        return PolysubError(
            ErrorCode.CONFIG_ERROR,
            f"'{command}' needs a problem file with a '{section}' section",
            details={"command": command, "section": section},
        )

    def _term(self, problem: Problem, command: str) -> Term:
        if problem.term is None:
            raise self._missing(command, "term")
        return problem.term

    # -- commands ------------------------------------------------------------

    def validate(self, problem: Problem) -> ValidationReport:
        """Closure of the order, rendered without reflexive pairs."""
        alphabet = problem.alphabet
        rank = {name: i for i, name in enumerate(alphabet.names)}
        order = sorted(
            ((lower, upper) for lower, upper in alphabet.order if lower != upper),
            key=lambda pair: (rank[pair[0]], rank[pair[1]]),
        )
        logger.info("validate_complete", constructors=len(alphabet.constructors), pairs=len(order))
        return ValidationReport(
            constructors=[f"{c.name}/{c.arity}" for c in alphabet.constructors],
            order=order,
        )

    def subtype(self, problem: Problem) -> SubtypeReport:
        if problem.pair is None:
            raise self._missing("subtype", "subtype")
        lhs, rhs = problem.pair
        holds = subtype(problem.alphabet, lhs, rhs)
        logger.info("subtype_complete", lhs=str(lhs), rhs=str(rhs), holds=holds)
        return SubtypeReport(lhs=str(lhs), rhs=str(rhs), holds=holds)

    def generate(self, problem: Problem) -> ConstraintReport:
        term = self._term(problem, "gen")
        gamma, tau, system = constraints_for(term, problem.signatures, FreshNames())
        return ConstraintReport(
            term=str(term),
            assignment=gamma.to_strings(),
            type=str(tau),
            inequations=[str(i) for i in system.inequations],
        )

    def _solve(
        self,
        system: InequationSystem,
        problem: Problem,
        on_generation: Optional[GenerationCallback],
    ) -> SolveResult:
        options = self.config.solver
        return solve(
            system,
            problem.alphabet,
            verify=bool(options["verify_witness"]),
            max_generations=options["max_generations"],
            on_generation=on_generation,
        )

    def _oracle_budget(self, result: SolveResult) -> OracleBudget:
        budget = self.config.oracle
        depth = max(budget.max_depth, result.stats.generations + 1)
        return budget.model_copy(update={"max_depth": depth})

    def solve(
        self,
        problem: Problem,
        oracle: bool = False,
        on_generation: Optional[GenerationCallback] = None,
    ) -> SolveReport:
        """
        Decide solvability of the problem's system.

        With ``oracle`` the verdict is re-derived by brute force at depth
        max(oracle.max_depth, generations + 1).

        Raises:
            OracleDisagreementError: solver and oracle verdicts differ
        """
        if problem.system is None:
            raise self._missing("solve", "solve")
        system = problem.system

        result = self._solve(system, problem, on_generation)
        witness = None
        if result.witness is not None:
            witness = close_witness(result.witness, system, problem).to_strings()

        oracle_verdict: Optional[bool] = None
        if oracle:
            budget = self._oracle_budget(result)
            oracle_verdict = brute_solvable(system, budget.max_depth, problem.alphabet, budget)
            logger.info("oracle_complete", verdict=oracle_verdict, depth=budget.max_depth)
            if oracle_verdict != result.verdict:
                raise OracleDisagreementError(
                    f"solver says {'solvable' if result.verdict else 'unsolvable'}, "
                    f"oracle says {'solvable' if oracle_verdict else 'unsolvable'}",
                    details={"system": str(system), "depth": budget.max_depth},
                )

        return SolveReport(
            solvable=result.verdict,
            witness=witness,
            stats=result.stats,
            oracle_verdict=oracle_verdict,
        )

    def check(
        self,
        problem: Problem,
        oracle: bool = False,
        on_generation: Optional[GenerationCallback] = None,
    ) -> CheckReport:
        """
        Run the full typability pipeline on the problem's term.

        On success the inferred result is τ_init·Θ and Γ_init·Θ for the
        closed completion Θ of the solver's witness.

        Raises:
            PolysubError: INTERNAL_WITNESS_FAILURE if the closed witness
                does not solve the generated system
            OracleDisagreementError: with ``oracle``, when brute-force
                typability or derivability of the result disagrees
        """
        term = self._term(problem, "check")
        gamma, tau, system = constraints_for(term, problem.signatures, FreshNames())
        logger.info("constraints_ready", term=str(term), inequations=system.size)

        result = self._solve(system, problem, on_generation)

        typable = result.verdict
        theta: Optional[ParameterSubstitution] = None
        if result.witness is not None:
            theta = close_witness(result.witness, system, problem)
            if not verify_witness(system, theta, problem.alphabet):
                raise PolysubError(
                    ErrorCode.INTERNAL_WITNESS_FAILURE,
                    f"closed witness {theta} does not solve the generated system",
                    details={"witness": theta.to_strings()},
                )

        oracle_verdict: Optional[bool] = None
        if oracle:
            budget = self._oracle_budget(result)
            oracle_verdict = brute_typable(term, problem.signatures, problem.alphabet, budget)
            logger.info("oracle_complete", verdict=oracle_verdict, depth=budget.max_depth)
            if oracle_verdict != typable:
                raise OracleDisagreementError(
                    f"pipeline says {'typable' if typable else 'untypable'}, "
                    f"oracle says {'typable' if oracle_verdict else 'untypable'}",
                    details={"term": str(term), "depth": budget.max_depth},
                )
            if theta is not None and not derives(
                apply_to_assignment(theta, gamma),
                term,
                apply_subst(theta, tau),
                problem.signatures,
                problem.alphabet,
                budget,
            ):
                raise OracleDisagreementError(
                    "oracle cannot derive the inferred typing",
                    details={"term": str(term), "witness": theta.to_strings()},
                )

        logger.info("check_complete", term=str(term), typable=typable, **result.stats.summary())

        if theta is None:
            return CheckReport(typable=False, stats=result.stats, oracle_verdict=oracle_verdict)
        return CheckReport(
            typable=True,
            type=str(apply_subst(theta, tau)),
            assignment=apply_to_assignment(theta, gamma).to_strings(),
            witness=theta.to_strings(),
            stats=result.stats,
            oracle_verdict=oracle_verdict,
        )


def create_pipeline(config_path: str | Path | None = None) -> TypingPipeline:
    """
    Create a configured pipeline.

    Args:
        config_path: Path to settings.yaml; None uses built-in defaults

    Returns:
        Configured TypingPipeline
    """
    config = EngineConfig(Path(config_path) if config_path else None)
    return TypingPipeline(config=config)
