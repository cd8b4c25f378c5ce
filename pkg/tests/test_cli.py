"""
Tests for the polysub command line.

Reports are read back from --output files; exit codes follow
0 positive, 1 negative, 2 input error, 3 oracle disagreement.
"""

import json
import sys
from pathlib import Path

import pytest
from typer.testing import CliRunner

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from polysub import pipeline as pipeline_module
from polysub.cli import (
    EXIT_INPUT_ERROR,
    EXIT_NEGATIVE,
    EXIT_ORACLE_DISAGREEMENT,
    EXIT_POSITIVE,
    app,
    configure_logging,
)
from polysub.models import ErrorCode, PolysubError
from tests.conftest import R_PROBLEM_HEADER, quiet_logging

runner = CliRunner()


@pytest.fixture(autouse=True)
def reset_logging():
    """The CLI binds structlog to the runner's stderr; rebind after each test."""
    yield
    quiet_logging()


def run(tmp_path: Path, *args: str):
    """Invoke the CLI with --output and return (exit code, report document)."""
    out = tmp_path / "report.json"
    result = runner.invoke(app, [*args, "--output", str(out)])
    document = json.loads(out.read_text(encoding="utf-8")) if out.exists() else None
    return result.exit_code, document


def expected_report(fixtures_dir: Path, name: str) -> dict:
    return json.loads((fixtures_dir / "expected" / f"{name}.json").read_text(encoding="utf-8"))


# ============================================================================
# Golden problems
# ============================================================================


GOLDEN = [
    ("check", "typable", EXIT_POSITIVE, "typable"),
    ("check", "untypable", EXIT_NEGATIVE, "untypable"),
    ("solve", "unsolvable", EXIT_NEGATIVE, "unsolvable"),
    ("solve", "solvable", EXIT_POSITIVE, "solvable"),
    ("subtype", "subtype", EXIT_POSITIVE, "holds"),
]


class TestGoldenProblems:
    """Tests for the fixture problems end to end."""

    @pytest.mark.parametrize("command, name, code, verdict", GOLDEN)
    def test_verdict_and_exit_code(self, tmp_path, fixtures_dir, command, name, code, verdict):
        exit_code, document = run(tmp_path, command, str(fixtures_dir / f"{name}.problem"))
        assert exit_code == code
        assert document["schema"] == 1
        assert document["verdict"] == verdict

    @pytest.mark.parametrize("command, name, code, verdict", GOLDEN)
    def test_reports_are_reproducible(self, tmp_path, fixtures_dir, command, name, code, verdict):
        path = str(fixtures_dir / f"{name}.problem")
        first = run(tmp_path / "first", command, path)
        second = run(tmp_path / "second", command, path)
        assert first == second

    @pytest.mark.parametrize("command, name, code, verdict", GOLDEN)
    def test_reports_match_checked_in(self, tmp_path, fixtures_dir, command, name, code, verdict):
        """Reports minus run statistics equal the files under fixtures/expected."""
        _, document = run(tmp_path, command, str(fixtures_dir / f"{name}.problem"))
        document.pop("stats", None)
        assert document == expected_report(fixtures_dir, name)

    def test_incompatible_alphabet(self, tmp_path, fixtures_dir):
        exit_code, document = run(tmp_path, "validate", str(fixtures_dir / "incompatible.problem"))
        assert exit_code == EXIT_INPUT_ERROR
        error = document["error"]
        assert error["code"] == "INCOMPATIBLE"
        assert error["details"]["triple"] == ["L1", "K1", "L2"]
        assert error["line"] == 3
        assert set(error) == {"code", "message", "line", "column", "details"}
        assert document == expected_report(fixtures_dir, "incompatible")

    def test_check_document(self, tmp_path, fixtures_dir):
        _, document = run(tmp_path, "check", str(fixtures_dir / "typable.problem"), "--trace")
        assert document["type"] == "list(int)"
        assert document["assignment"] == {}
        assert document["stats"]["generations"] == 2
        assert document["trace"] == [2, 1]

    def test_solve_document(self, tmp_path, fixtures_dir):
        _, document = run(tmp_path, "solve", str(fixtures_dir / "solvable.problem"))
        assert document["witness"] == {"a": "list(nat)"}
        assert "trace" not in document


# ============================================================================
# Other commands
# ============================================================================


class TestCommands:
    """Tests for validate and gen."""

    def test_validate(self, tmp_path, fixtures_dir):
        exit_code, document = run(tmp_path, "validate", str(fixtures_dir / "typable.problem"))
        assert exit_code == EXIT_POSITIVE
        assert document["verdict"] == "valid"
        assert document["order"] == [["nat", "int"], ["list", "set"]]

    def test_gen(self, tmp_path, fixtures_dir):
        exit_code, document = run(tmp_path, "gen", str(fixtures_dir / "untypable.problem"))
        assert exit_code == EXIT_POSITIVE
        assert document["type"] == "'t#1"
        assert "nat <= list('a#2)" in document["inequations"]

    def test_subtype_fails(self, tmp_path):
        problem = tmp_path / "query.problem"
        problem.write_text("alphabet: nat/0, int/0\norder: nat <= int\nsubtype: int, nat\n")
        exit_code, document = run(tmp_path, "subtype", str(problem))
        assert exit_code == EXIT_NEGATIVE
        assert document["verdict"] == "fails"

    def test_json_on_stdout(self, fixtures_dir):
        result = runner.invoke(app, ["subtype", str(fixtures_dir / "subtype.problem"), "--json"])
        assert result.exit_code == EXIT_POSITIVE
        assert '"verdict": "holds"' in result.output

    def test_oracle_flag(self, tmp_path, fixtures_dir):
        exit_code, document = run(tmp_path, "check", str(fixtures_dir / "typable.problem"), "--oracle")
        assert exit_code == EXIT_POSITIVE
        assert document["oracle"] == "typable"


# ============================================================================
# Errors
# ============================================================================


class TestErrors:
    """Tests for exit code 2 and 3 paths."""

    def test_missing_problem_file(self, tmp_path):
        exit_code, document = run(tmp_path, "check", str(tmp_path / "absent.problem"))
        assert exit_code == EXIT_INPUT_ERROR
        assert document["error"]["code"] == "CONFIG_ERROR"

    def test_parse_error(self, tmp_path):
        problem = tmp_path / "broken.problem"
        problem.write_text("alphabet nat/0\n")
        exit_code, document = run(tmp_path, "validate", str(problem))
        assert exit_code == EXIT_INPUT_ERROR
        assert document["error"]["code"] == "PARSE_ERROR"
        assert document["error"]["line"] == 1

    def test_wrong_payload(self, tmp_path, fixtures_dir):
        exit_code, document = run(tmp_path, "solve", str(fixtures_dir / "typable.problem"))
        assert exit_code == EXIT_INPUT_ERROR
        assert document["error"]["details"]["section"] == "solve"

    def test_bad_config(self, tmp_path, fixtures_dir):
        config = tmp_path / "settings.yaml"
        config.write_text("solver:\n  max_generations: 1\n")
        exit_code, document = run(
            tmp_path, "solve", str(fixtures_dir / "solvable.problem"), "--config", str(config)
        )
        assert exit_code == EXIT_INPUT_ERROR
        assert document["error"]["code"] == "CONFIG_ERROR"

    def test_oracle_disagreement(self, tmp_path, fixtures_dir, monkeypatch):
        monkeypatch.setattr(pipeline_module, "brute_solvable", lambda *args, **kwargs: False)
        exit_code, document = run(tmp_path, "solve", str(fixtures_dir / "solvable.problem"), "--oracle")
        assert exit_code == EXIT_ORACLE_DISAGREEMENT
        assert document["error"]["code"] == "ORACLE_DISAGREEMENT"

    def test_deeply_nested_term(self, tmp_path):
        problem = tmp_path / "deep.problem"
        problem.write_text(R_PROBLEM_HEADER + "term: " + "s(" * 3000 + "zero" + ")" * 3000 + "\n")
        exit_code, document = run(tmp_path, "check", str(problem))
        assert exit_code == EXIT_POSITIVE
        assert document["verdict"] == "typable"
        assert document["type"] == "nat"

    def test_stack_overflow_is_an_input_error(self, tmp_path):
        nested = "list(" * 3000 + "nat" + ")" * 3000
        problem = tmp_path / "deep.problem"
        problem.write_text(R_PROBLEM_HEADER + f"subtype: {nested}, {nested}\n")
        exit_code, document = run(tmp_path, "subtype", str(problem))
        assert exit_code == EXIT_INPUT_ERROR
        assert document["error"]["code"] == "INPUT_TOO_DEEP"
        assert set(document["error"]) == {"code", "message", "line", "column", "details"}

    def test_recursion_in_any_stage(self, tmp_path, fixtures_dir, monkeypatch):
        def overflow(*args, **kwargs):
            raise RecursionError("maximum recursion depth exceeded")

        monkeypatch.setattr(pipeline_module, "solve", overflow)
        exit_code, document = run(tmp_path, "solve", str(fixtures_dir / "solvable.problem"))
        assert exit_code == EXIT_INPUT_ERROR
        assert document["error"]["code"] == "INPUT_TOO_DEEP"

    def test_unknown_log_level(self):
        with pytest.raises(PolysubError) as exc_info:
            configure_logging("chatty")
        assert exc_info.value.code is ErrorCode.CONFIG_ERROR
