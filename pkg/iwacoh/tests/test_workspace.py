import copy
import json

import pytest

from iwacoh.errors import ParseError, ValidationError
from iwacoh.workspace import (FAIL, INCONCLUSIVE, PASS, REPORT_SCHEMA, SCHEMA, load_workspace, loads_workspace,
                              parse_workspace, run)

BASE = {
    "schema": SCHEMA,
    "ring": {"p": 2, "e": 1},
    "groups": {"G": "cyclic:2"},
    "modules": {"M": {"group": "G", "exps": [1]}},
    "tasks": [],
}


def workspace(tasks, ring=None, **sections):
    doc = copy.deepcopy(BASE)
    doc["tasks"] = tasks
    if ring is not None:
        doc["ring"] = ring
    for key, value in sections.items():
        doc.setdefault(key, {}).update(value)
    return load_workspace(doc)


def only_result(w, seed=0):
    report = run(w, seed)
    assert len(report.tasks) == 1
    return report, report.tasks[0]


class TestParsing:
    def test_minimal_file(self, tmp_path):
        path = tmp_path / "w.json"
        doc = dict(BASE, tasks=[{"kind": "cohomology", "module": "M"}])
        path.write_text(json.dumps(doc), encoding="utf-8")
        w = parse_workspace(path)
        assert w.ring.modulus == 2
        assert w.groups["G"].order == 2
        assert w.modules["M"].label == "M"
        assert w.tasks[0].degrees == (0, 3)

    def test_json_errors_carry_the_line(self):
        with pytest.raises(ParseError) as info:
            loads_workspace('{\n  "schema": }')
        assert info.value.line == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            parse_workspace(tmp_path / "absent.json")

    def test_schema_is_checked(self):
        with pytest.raises(ValidationError, match="schema"):
            load_workspace(dict(BASE, schema="other/1"))

    def test_unknown_module(self):
        with pytest.raises(ValidationError, match=r"tasks\[0\]\.module"):
            workspace([{"kind": "cohomology", "module": "N"}])

    def test_unknown_task_kind(self):
        with pytest.raises(ValidationError, match="unknown task kind"):
            workspace([{"kind": "homology", "module": "M"}])

    def test_non_associative_table_names_the_group(self):
        table = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
        with pytest.raises(ValidationError, match="groups.K.*not associative"):
            workspace([], groups={"K": {"table": table}})

    def test_action_shape_is_checked(self):
        with pytest.raises(ValidationError, match="modules.S.action"):
            workspace([], modules={"S": {"group": "G", "exps": [1], "action": [[[1]]]}})

    def test_circular_references(self):
        with pytest.raises(ValidationError, match="circular"):
            workspace([], modules={"A": {"dual": "B"}, "B": {"dual": "A"}})

    def test_degree_cap(self):
        with pytest.raises(ValidationError, match="exceeds the cap"):
            workspace([{"kind": "cohomology", "module": "M", "degrees": [0, 5]}])

    def test_unknown_config_key(self):
        with pytest.raises(ValidationError, match="config"):
            workspace([], config={"speed": 1})

    def test_selection_and_degree_override(self):
        w = workspace([{"kind": "cohomology", "module": "M"}, {"kind": "tate", "module": "M"}])
        assert [t.kind for t in w.select(["tate"]).tasks] == ["tate"]
        assert w.with_degrees(0, 1).tasks[0].degrees == (0, 1)
        with pytest.raises(ValidationError):
            w.with_degrees(2, 1)


class TestRunning:
    def test_cohomology_with_expectations_and_oracle(self):
        w = workspace([{"kind": "cohomology", "module": "M", "degrees": [0, 2], "expect": {"1": "Z/2"},
                        "oracle": True}])
        report, result = only_result(w)
        assert report.verdict == PASS and report.exit_code == 0
        assert [result.results["H^%d" % i] for i in range(3)] == ["Z/2"] * 3
        assert len(result.witnesses["H^1"]) == 1

    def test_failed_expectation(self):
        w = workspace([{"kind": "cohomology", "module": "M", "degree": 1, "expect": {"1": "Z/4"}}])
        report, result = only_result(w)
        assert result.verdict == FAIL
        assert report.exit_code == 1
        assert "expected H^1 = Z/4" in result.message

    def test_tate_with_coprime_coefficients(self):
        w = workspace([{"kind": "tate", "module": "N", "degrees": [-3, 3]}], ring={"p": 3, "e": 2},
                      modules={"M": {"group": "G", "exps": [1]}, "N": {"group": "G", "exps": [2]}})
        _, result = only_result(w)
        assert [result.results["Ĥ^%d" % i] for i in range(-3, 4)] == ["0"] * 7

    def test_complex_coefficients(self):
        w = workspace([{"kind": "cohomology", "module": "X", "degrees": [0, 1]}],
                      complexes={"X": {"terms": {"0": "M", "1": "M"}, "diffs": {"0": [[0]]}}})
        _, result = only_result(w)
        assert result.results["H^0"] == "Z/2"
        assert result.results["H^1"] == "Z/2 ⊕ Z/2"

    def test_shapiro_and_duality(self):
        w = workspace([{"kind": "shapiro", "group": "S", "module": {"exps": [1]}, "subgroup": [0, 3, 4]},
                       {"kind": "duality", "module": "M"}], groups={"S": "s3"})
        report = run(w)
        assert report.verdict == PASS
        shapiro, duality = report.tasks
        assert shapiro.results["H^1(G, M_U)"] == shapiro.results["H^1(U, M)"] == "0"
        assert duality.results["Ĥ^0(M)"] == duality.results["Ĥ^-1(M^∨)"] == "Z/2"

    def test_compact_support(self):
        w = workspace([{"kind": "compact", "module": "M", "local_datum": "S"}],
                      local_data={"S": {"group": "G", "places": [{"subgroup": [0]}]}})
        _, result = only_result(w)
        assert result.results["H^0_c"] == "0"
        assert result.results["H^1_c"] == "Z/2"
        assert result.witnesses["les"][0].startswith("loc[-1]^0")

    def test_towers(self):
        w = workspace([{"kind": "tower", "tower": "T", "module": {"exps": [1]}, "degree": 1},
                       {"kind": "tower", "limit": "lim", "group": "G", "degree": 2}],
                      ring={"p": 2, "e": 3}, towers={"T": {"cyclic_p": {"p": 2, "depth": 3}}})
        report = run(w)
        colim, lim = report.tasks
        assert colim.results["colim H^1"] == "Z/2"
        assert lim.results["lim H^2"] == "Z/2"
        assert report.verdict == PASS

    def test_unstable_tower_is_inconclusive(self):
        w = workspace([{"kind": "tower", "tower": "T", "module": {"exps": [1]}, "degree": 1}],
                      towers={"T": {"cyclic_p": {"p": 2, "depth": 2}, "window": 2}})
        report, result = only_result(w)
        assert result.verdict == INCONCLUSIVE
        assert report.exit_code == 1
        assert result.witnesses["levels"] == ["Z/2", "Z/2"]

    def test_verify_task(self):
        w = workspace([{"kind": "verify", "suites": ["signs"], "cases": 2}])
        _, result = only_result(w)
        assert result.results == {"signs": "2/2 exact"}

    def test_reports_are_deterministic(self):
        w = workspace([{"kind": "cohomology", "module": "M"}, {"kind": "verify", "suites": ["cups"], "cases": 2}])
        first, second = run(w, seed=42), run(w, seed=42)
        assert first.to_json() == second.to_json()
        doc = json.loads(first.to_json())
        assert doc["schema"] == REPORT_SCHEMA and doc["seed"] == 42
        assert first.to_text().startswith("iwacoh report (seed 42): pass")

    def test_parallel_run_matches(self):
        w = workspace([{"kind": "cohomology", "module": "M"}, {"kind": "tate", "module": "M"}])
        assert run(w, parallel=True, n_jobs=1).to_json() == run(w).to_json()
