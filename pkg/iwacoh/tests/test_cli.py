import json

import pytest
from click.testing import CliRunner

from iwacoh.cli import main
from iwacoh.workspace import SCHEMA

WORKSPACE = {
    "schema": SCHEMA,
    "ring": {"p": 2, "e": 1},
    "groups": {"G": "cyclic:2"},
    "modules": {"M": {"group": "G", "exps": [1]}},
    "local_data": {"S": {"group": "G", "places": [{"subgroup": [0]}]}},
    "tasks": [
        {"kind": "cohomology", "module": "M", "degrees": [0, 1], "expect": {"1": "Z/2"}},
        {"kind": "compact", "module": "M", "local_datum": "S", "degrees": [0, 1]},
    ],
}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def workspace_file(tmp_path):
    path = tmp_path / "w.json"
    path.write_text(json.dumps(WORKSPACE), encoding="utf-8")
    return str(path)


class TestTaskCommands:
    def test_cohomology_from_file(self, runner, workspace_file, tmp_path):
        report_path = tmp_path / "report.json"
        result = runner.invoke(main, ["cohomology", "--input", workspace_file, "--report", str(report_path)])
        assert result.exit_code == 0, result.output
        assert "H^1 = Z/2" in result.output
        doc = json.loads(report_path.read_text(encoding="utf-8"))
        assert doc["verdict"] == "pass"
        assert [t["kind"] for t in doc["tasks"]] == ["cohomology"]

    def test_inline_group(self, runner):
        result = runner.invoke(main, ["tate", "--group", "cyclic:2", "-p", "3", "-e", "2", "--exps", "2",
                                      "--degree-range", "-1..1"])
        assert result.exit_code == 0, result.output
        assert "Ĥ^0 = 0" in result.output

    def test_degree_range_override(self, runner, workspace_file):
        result = runner.invoke(main, ["compact", "--input", workspace_file, "--degree-range", "1..1"])
        assert result.exit_code == 0, result.output
        assert "H^1_c = Z/2" in result.output
        assert "H^0_c" not in result.output

    def test_failing_expectation_exits_one(self, runner, tmp_path):
        doc = dict(WORKSPACE, tasks=[{"kind": "cohomology", "module": "M", "degree": 1, "expect": {"1": "Z/4"}}])
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        result = runner.invoke(main, ["cohomology", "--input", str(path)])
        assert result.exit_code == 1

    def test_invalid_workspace_exits_two(self, runner, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"schema": "iwacoh-workspace/1",\n "ring": }', encoding="utf-8")
        result = runner.invoke(main, ["cohomology", "--input", str(path)])
        assert result.exit_code == 2

    def test_missing_input(self, runner):
        result = runner.invoke(main, ["shapiro"])
        assert result.exit_code == 2

    def test_bad_degree_range(self, runner, workspace_file):
        result = runner.invoke(main, ["cohomology", "--input", workspace_file, "--degree-range", "0-1"])
        assert result.exit_code == 2


class TestVerifyCommand:
    def test_reports_are_reproducible(self, runner, tmp_path):
        outputs = []
        for k in range(2):
            path = tmp_path / ("r%d.json" % k)
            result = runner.invoke(main, ["verify", "--seed", "42", "--cases", "1", "--report", str(path)])
            assert result.exit_code == 0, result.output
            outputs.append(path.read_text(encoding="utf-8"))
        assert outputs[0] == outputs[1]
        doc = json.loads(outputs[0])
        assert doc["seed"] == 42
        assert len(doc["tasks"]) == 10

    def test_single_suite(self, runner):
        result = runner.invoke(main, ["verify", "--suite", "signs", "--cases", "3"])
        assert result.exit_code == 0, result.output
        assert "signs = 3/3 exact" in result.output

    def test_unknown_suite_exits_two(self, runner):
        result = runner.invoke(main, ["verify", "--suite", "nope"])
        assert result.exit_code == 2
