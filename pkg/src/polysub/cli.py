"""
CLI Entrypoint for polysub

Decides typability of first-order terms under inclusion and parametric
polymorphism, and exposes each stage of the decision on its own.

Usage:
    polysub validate FILE [--json] [--output PATH]
    polysub subtype FILE
    polysub gen FILE
    polysub solve FILE [--trace] [--oracle]
    polysub check FILE [--trace] [--oracle]

Exit codes: 0 positive verdict, 1 negative verdict, 2 input or
configuration error, 3 oracle disagreement.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Tuple

import structlog
import typer
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from polysub.models import ErrorCode, PolysubError, Problem
from polysub.parser import parse_problem_file
from polysub.pipeline import DEFAULT_LOG_LEVEL, TypingPipeline, create_pipeline

app = typer.Typer(
    name="polysub",
    help="Typability checker for inclusion and parametric polymorphism",
    add_completion=False,
)

console = Console()
err_console = Console(stderr=True)

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_INPUT_ERROR = 2
EXIT_ORACLE_DISAGREEMENT = 3

LOG_LEVELS = {
    "debug": logging.DEBUG,
    "info": logging.INFO,
    "warning": logging.WARNING,
    "error": logging.ERROR,
}

logger = structlog.get_logger()

# (report document, positive verdict, human-readable renderer)
CommandOutcome = Tuple[dict[str, Any], bool, Callable[[Console], None]]


def configure_logging(level: str) -> None:
    """Route structlog to stderr so stdout carries only reports."""
    if level not in LOG_LEVELS:
        raise PolysubError(
            ErrorCode.CONFIG_ERROR,
            f"unknown log level '{level}'",
            details={"level": level, "allowed": sorted(LOG_LEVELS)},
        )
    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(LOG_LEVELS[level]),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


def _write_json(document: dict[str, Any], json_out: bool, output: Optional[Path], indent: int) -> None:
    if json_out:
        typer.echo(json.dumps(document, ensure_ascii=False))
    if output is not None:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(json.dumps(document, indent=indent, ensure_ascii=False) + "\n", encoding="utf-8")


def _too_deep(exc: RecursionError) -> PolysubError:
    return PolysubError(
        ErrorCode.INPUT_TOO_DEEP,
        "input nests deeper than the interpreter stack allows",
        details={"recursion_limit": sys.getrecursionlimit(), "reason": str(exc)},
    )


def _run(
    command: str,
    file: Path,
    json_out: bool,
    output: Optional[Path],
    config: Optional[Path],
    verbose: bool,
    body: Callable[[TypingPipeline, Problem, Console], CommandOutcome],
) -> None:
    """Shared driver: configure, parse, run, report, exit."""
    human = err_console if json_out else console
    schema, indent = 1, 2
    configure_logging("debug" if verbose else DEFAULT_LOG_LEVEL)

    try:
        pipeline = create_pipeline(config)
        schema = pipeline.schema_version
        indent = int(pipeline.config.output["indent"])
        if not verbose:
            configure_logging(pipeline.config.log_level)

        problem = parse_problem_file(file)
        document, positive, render = body(pipeline, problem, human)
    except (PolysubError, RecursionError) as caught:
        exc = caught if isinstance(caught, PolysubError) else _too_deep(caught)
        logger.error("command_failed", command=command, code=exc.code.value, error=exc.message)
        _write_json({"schema": schema, "error": exc.to_dict()}, json_out, output, indent)
        human.print(f"[bold red]{exc.code.value}:[/] {escape(exc.message)}")
        if exc.line is not None:
            human.print(f"[dim]  at {file}:{exc.line}:{exc.column}[/]")
        if exc.code is ErrorCode.ORACLE_DISAGREEMENT:
            raise typer.Exit(code=EXIT_ORACLE_DISAGREEMENT) from exc
        raise typer.Exit(code=EXIT_INPUT_ERROR) from exc

    _write_json(document, json_out, output, indent)
    render(human)
    raise typer.Exit(code=EXIT_POSITIVE if positive else EXIT_NEGATIVE)


def _trace_printer(enabled: bool, human: Console) -> Optional[Callable[[int, int], None]]:
    if not enabled:
        return None

    def show(generation: int, size: int) -> None:
        human.print(f"[dim]generation {generation}: {size} new system(s)[/]")

    return show


def _print_mapping(human: Console, title: str, mapping: dict[str, str]) -> None:
    if not mapping:
        return
    table = Table(title=title, show_header=False)
    table.add_column("name", style="cyan")
    table.add_column("type")
    for name, value in mapping.items():
        table.add_row(escape(name), escape(value))
    human.print(table)


FILE_ARGUMENT = typer.Argument(..., help="Problem file")
JSON_OPTION = typer.Option(False, "--json", help="Print the JSON report on stdout")
OUTPUT_OPTION = typer.Option(None, "--output", "-o", help="Also write the JSON report to this file")
CONFIG_OPTION = typer.Option(None, "--config", "-c", help="Path to settings.yaml configuration file")
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr")
TRACE_OPTION = typer.Option(False, "--trace", help="Show the number of new systems per generation")
ORACLE_OPTION = typer.Option(False, "--oracle", help="Cross-check the verdict by brute force")


@app.command()
def validate(
    file: Path = FILE_ARGUMENT,
    json_out: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
    config: Optional[Path] = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Check that the alphabet's order is a partial order compatible with arities."""

    def body(pipeline: TypingPipeline, problem: Problem, human: Console) -> CommandOutcome:
        report = pipeline.validate(problem)

        def render(out: Console) -> None:
            out.print(f"[bold green]valid[/] alphabet: {', '.join(report.constructors)}")
            for lower, upper in report.order:
                out.print(f"  {lower} <= {upper}")

        return report.to_document(pipeline.schema_version), True, render

    _run("validate", file, json_out, output, config, verbose, body)


@app.command()
def subtype(
    file: Path = FILE_ARGUMENT,
    json_out: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
    config: Optional[Path] = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Decide the subtype query of the problem file."""

    def body(pipeline: TypingPipeline, problem: Problem, human: Console) -> CommandOutcome:
        report = pipeline.subtype(problem)

        def render(out: Console) -> None:
            verdict = "[bold green]holds[/]" if report.holds else "[bold red]fails[/]"
            out.print(f"{escape(report.lhs)} <= {escape(report.rhs)} {verdict}")

        return report.to_document(pipeline.schema_version), report.holds, render

    _run("subtype", file, json_out, output, config, verbose, body)


@app.command()
def gen(
    file: Path = FILE_ARGUMENT,
    json_out: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
    config: Optional[Path] = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Print the type inequations generated for the problem's term."""

    def body(pipeline: TypingPipeline, problem: Problem, human: Console) -> CommandOutcome:
        report = pipeline.generate(problem)

        def render(out: Console) -> None:
            out.print(f"[bold]term:[/] {escape(report.term)} : {escape(report.type)}")
            _print_mapping(out, "assignment", report.assignment)
            for inequation in report.inequations:
                out.print(f"  {escape(inequation)}")

        return report.to_document(pipeline.schema_version), True, render

    _run("gen", file, json_out, output, config, verbose, body)


@app.command()
def solve(
    file: Path = FILE_ARGUMENT,
    trace: bool = TRACE_OPTION,
    oracle: bool = ORACLE_OPTION,
    json_out: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
    config: Optional[Path] = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Decide solvability of the problem's inequation system."""

    def body(pipeline: TypingPipeline, problem: Problem, human: Console) -> CommandOutcome:
        report = pipeline.solve(problem, oracle=oracle, on_generation=_trace_printer(trace, human))

        def render(out: Console) -> None:
            if report.solvable:
                out.print("[bold green]solvable[/]")
                _print_mapping(out, "witness", report.witness or {})
            else:
                out.print("[bold red]unsolvable[/]")
            out.print(f"[dim]{report.stats.summary()}[/]")

        return report.to_document(pipeline.schema_version, trace), report.solvable, render

    _run("solve", file, json_out, output, config, verbose, body)


@app.command()
def check(
    file: Path = FILE_ARGUMENT,
    trace: bool = TRACE_OPTION,
    oracle: bool = ORACLE_OPTION,
    json_out: bool = JSON_OPTION,
    output: Optional[Path] = OUTPUT_OPTION,
    config: Optional[Path] = CONFIG_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """Decide whether the problem's term is typable and show an inferred typing."""

    def body(pipeline: TypingPipeline, problem: Problem, human: Console) -> CommandOutcome:
        report = pipeline.check(problem, oracle=oracle, on_generation=_trace_printer(trace, human))

        def render(out: Console) -> None:
            if report.typable:
                out.print(f"[bold green]typable[/] : {escape(report.type or '')}")
                _print_mapping(out, "assignment", report.assignment or {})
            else:
                out.print("[bold red]untypable[/]")
            out.print(f"[dim]{report.stats.summary()}[/]")

        return report.to_document(pipeline.schema_version, trace), report.typable, render

    _run("check", file, json_out, output, config, verbose, body)


if __name__ == "__main__":
    app()
