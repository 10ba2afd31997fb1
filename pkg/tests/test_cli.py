import csv
import io
import json
from pathlib import Path

import jsonschema
import pytest

from lab_core import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, TubeLab
from utils.command_parser import CommandParser, UsageError

FLAT = {"k1": {"kind": "zero"}, "k2": {"kind": "zero"}, "k3": {"kind": "zero"}}
SUITE_SCHEMA = json.loads((Path(__file__).resolve().parent.parent / "schemas"
                           / "suite_report.schema.json").read_text(encoding="utf-8"))


@pytest.fixture
def lab():
    return TubeLab(stdout=io.StringIO(), stderr=io.StringIO())


def config_file(tmp_path, document):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return str(path)


def test_parser_accepts_strings_and_lists():
    parser = CommandParser()
    cmd, options = parser.parse("mesh --config 'my run.json' --threads 2")
    assert cmd == "mesh"
    assert options.config == "my run.json"
    assert options.threads == 2
    cmd, options = parser.parse(["frame", "--verbose"])
    assert cmd == "frame" and options.verbose and options.out is None


@pytest.mark.parametrize("line", ["", "plot", "lk --threads 0", "lk --bogus", "lk --config 'open"])
def test_parser_rejects_bad_lines(line):
    with pytest.raises(UsageError):
        CommandParser().parse(line)


def test_usage_error_exits_2(lab):
    assert lab.execute(["plot"]) == EXIT_USAGE
    assert "Usage error" in lab.stderr.getvalue()


def test_malformed_config_exits_2(lab, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"r": 0.5,,}', encoding="utf-8")
    assert lab.execute(["frame", "--config", str(path)]) == EXIT_USAGE
    assert "line 1" in lab.stderr.getvalue()


def test_unknown_config_key_exits_2(lab, tmp_path):
    path = config_file(tmp_path, {"grid": {"z": 3}})
    assert lab.execute(["lk", "--config", path]) == EXIT_USAGE
    assert "grid.z" in lab.stderr.getvalue()


def test_missing_config_exits_2(lab, tmp_path):
    assert lab.execute(["lk", "--config", str(tmp_path / "nope.json")]) == EXIT_USAGE


def test_frame_on_straight_line_passes(lab, tmp_path):
    path = config_file(tmp_path, {"curvatures": FLAT, "s_range": [0, 1]})
    out = tmp_path / "out"
    assert lab.execute(["frame", "--config", path, "--out", str(out)]) == EXIT_OK
    report = json.loads((out / "frame_report.json").read_text())
    assert report["within_tolerance"]
    assert report["schema_version"] == "1.0"
    assert [c["case"] for c in report["cases"]] == ["TIMELIKE_CENTER", "SPACELIKE_J2",
                                                   "SPACELIKE_J3", "SPACELIKE_J4"]
    assert "\033[" not in lab.stdout.getvalue()


def test_lk_writes_table_and_summary(lab, tmp_path):
    path = config_file(tmp_path, {"s_range": [0, 2], "grid": {"s": 2, "t": 3, "w": 4}})
    out = tmp_path / "out"
    assert lab.execute(["lk", "--config", path, "--out", str(out)]) == EXIT_OK

    with open(out / "lk_timelike.csv", newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 24
    excluded = [r for r in rows if r["regular"] == "0"]
    assert len(excluded) == 12
    assert all(r["L1N_F1"] == "nan" for r in excluded)

    summary = json.loads((out / "lk_timelike_summary.json").read_text())
    assert summary["points"] == 12 and summary["excluded"] == 12
    assert summary["status"] == "agreement"
    assert set(summary["discrepancy"]) == {"L1", "L2"}
    assert summary["discrepancy"]["L1"]["max"]["F2"] < 1e-6
    assert len(summary["terms"]) == 8


def test_lk_with_every_point_singular_exits_1(lab, tmp_path):
    path = config_file(tmp_path, {"s_range": [0, 2], "grid": {"s": 2, "t": 2, "w": 2},
                                  "tolerances": {"reg_tol": 10.0}})
    assert lab.execute(["lk", "--config", path, "--out", str(tmp_path)]) == EXIT_FAILURE
    assert "singular" in lab.stdout.getvalue()


def test_mesh_to_unwritable_path_exits_1(lab, tmp_path):
    blocker = tmp_path / "file.txt"
    blocker.write_text("not a directory", encoding="utf-8")
    path = config_file(tmp_path, {"mesh": {"slices": 1, "t": 3, "w": 3}})
    code = lab.execute(["mesh", "--config", path, "--out", str(blocker / "sub")])
    assert code == EXIT_FAILURE
    assert "Cannot write output" in lab.stderr.getvalue()


def test_mesh_writes_obj_and_table(lab, tmp_path):
    path = config_file(tmp_path, {"family": {"j": 2, "lambda": 1},
                                  "mesh": {"slices": 2, "t": 3, "w": 4}})
    assert lab.execute(["mesh", "--config", path, "--out", str(tmp_path)]) == EXIT_OK
    obj = (tmp_path / "tube_j2_lambda+1.obj").read_text()
    assert sum(line.startswith("v ") for line in obj.splitlines()) == 24
    assert sum(line.startswith("f ") for line in obj.splitlines()) == 24
    table = (tmp_path / "tube_j2_lambda+1_vertices.csv").read_text().splitlines()
    assert len(table) == 25


def test_lk_output_is_deterministic(tmp_path):
    path = config_file(tmp_path, {"s_range": [0, 2], "grid": {"s": 2, "t": 3, "w": 3}})
    for name in ("a", "b"):
        code = TubeLab(io.StringIO(), io.StringIO()).execute(
            ["lk", "--config", path, "--out", str(tmp_path / name)])
        assert code == EXIT_OK
    for name in ("lk_timelike.csv", "lk_timelike_summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_classify_on_empty_grid_exits_1(lab, tmp_path):
    path = config_file(tmp_path, {"families": ["timelike"], "s_range": [0, 1],
                                  "grid": {"s": 2, "t": 2, "w": 2},
                                  "tolerances": {"reg_tol": 10.0}})
    assert lab.execute(["classify", "--config", path, "--out", str(tmp_path)]) == EXIT_FAILURE
    assert "no usable grid points" in lab.stdout.getvalue()
    report = json.loads((tmp_path / "suite_report.json").read_text())
    jsonschema.validate(instance=report, schema=SUITE_SCHEMA)
    assert report["all_match"] is False
    assert len(report["checks"]) == 8


def test_classify_report_follows_schema(lab, tmp_path):
    path = config_file(tmp_path, {"families": ["timelike"], "s_range": [0, 2],
                                  "grid": {"s": 3, "t": 5, "w": 5},
                                  "fit": {"radii": [0.5, 2], "directions": 8}})
    assert lab.execute(["classify", "--config", path, "--out", str(tmp_path)]) == EXIT_OK
    report = json.loads((tmp_path / "suite_report.json").read_text())
    jsonschema.validate(instance=report, schema=SUITE_SCHEMA)
    assert report["schema_version"] == SUITE_SCHEMA["properties"]["schema_version"]["const"]
    floors = [o["residual_floor_met"] for c in report["checks"] for o in c["outcomes"]]
    assert True in floors and False not in floors
    assert "floor" in (tmp_path / "suite_report.txt").read_text().splitlines()[0]


def test_schema_rejects_report_without_checks():
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(instance={"schema_version": "1.0", "all_match": True, "settings": {}},
                            schema=SUITE_SCHEMA)
