import json
import math

import pytest

from geometry.tubes import ALL_FAMILIES, TubeFamily
from utils.config import (ConfigError, CurvaturePreset, RunConfig, config_summary, load_config,
                          parse_config)
from utils.report_io import atomic_write_text, format_float, write_csv, write_json


def write(tmp_path, text, name="run.json"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_missing_path_gives_defaults():
    config = load_config(None)
    assert config == RunConfig()
    assert config.families == ALL_FAMILIES
    assert config.s_range == (0.0, 2 * math.pi)
    assert len(config.suite.witnesses) == 2


def test_parse_full_document(tmp_path):
    path = write(tmp_path, json.dumps({
        "family": {"j": 3, "lambda": -1},
        "families": ["timelike", {"j": 4, "lambda": 1}],
        "r": 0.25,
        "curvatures": {"k1": {"kind": "constant", "c": 0.4}},
        "s_range": [0, 3],
        "grid": {"s": 4},
        "tolerances": {"class_tol": 1e-5},
        "fit": {"radii": [1, 2], "directions": 6},
        "suite": {"zero_witness": False, "witnesses": [{"k1": {"kind": "sinusoid", "a": 0.2,
                                                              "b": 0.05}}]},
        "operator_source": "closed",
        "seed": 7,
    }))
    config = load_config(path)
    assert config.family == TubeFamily.spacelike(3, -1)
    assert config.families == (TubeFamily.timelike(), TubeFamily.spacelike(4, 1))
    assert config.r == 0.25
    assert config.curvatures.k1 == CurvaturePreset("constant", (("c", 0.4),))
    assert config.curvatures.k2 == RunConfig().curvatures.k2
    assert config.grid.s == 4 and config.grid.t == 12
    assert config.tolerances.class_tol == 1e-5
    assert config.tolerances.reg_tol == 1e-3
    assert config.fit.radii == (1.0, 2.0)
    assert not config.suite.zero_witness
    witness = config.suite.witnesses[0]
    assert witness.k1.build()(0.0) == pytest.approx(0.2)
    # unnamed witness curvatures fall back to the run's own
    assert witness.k2 == config.curvatures.k2
    assert config.operator_source == "closed"
    assert config.seed == 7


@pytest.mark.parametrize("document, field_path", [
    ({"radius": 1.0}, "radius"),
    ({"grid": {"s": 4, "u": 3}}, "grid.u"),
    ({"curvatures": {"k1": {"kind": "constant", "c": 1, "d": 2}}}, "curvatures.k1.d"),
    ({"curvatures": {"k1": {"kind": "spiral"}}}, "curvatures.k1.kind"),
    ({"r": -1}, "r"),
    ({"r": "big"}, "r"),
    ({"grid": {"t": 1}}, "grid.t"),
    ({"families": [{"j": 5, "lambda": 1}]}, "families[0].j"),
    ({"family": {"j": 2, "lambda": 0}}, "family.lambda"),
    ({"s_range": [2, 1]}, "s_range"),
    ({"suite": {"witnesses": [{"k4": {}}]}}, "suite.witnesses[0].k4"),
    ({"fit": {"radii": []}}, "fit.radii"),
    ({"operator_source": "symbolic"}, "operator_source"),
    ({"curvatures": {"k1": {"kind": "table", "s": [0, 1, 1], "values": [0, 1, 2]}}},
     "curvatures.k1.s"),
])
def test_invalid_fields_name_their_path(document, field_path):
    with pytest.raises(ConfigError) as info:
        parse_config(document)
    assert info.value.field_path == field_path
    assert field_path in str(info.value)


def test_syntax_error_reports_line_and_column(tmp_path):
    path = write(tmp_path, '{\n  "r": 0.5,\n  "seed": ,\n}')
    with pytest.raises(ConfigError) as info:
        load_config(path)
    assert info.value.line == 3
    assert info.value.column == 11
    assert "line 3" in str(info.value)


def test_top_level_must_be_object(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "[1, 2]"))


def test_unreadable_file_raises_os_error(tmp_path):
    with pytest.raises(OSError):
        load_config(str(tmp_path / "missing.json"))


def test_curvature_presets_build():
    table = CurvaturePreset.parse({"kind": "table", "s": [0, 1, 2, 3], "values": [0, 1, 4, 9]}, "k")
    assert table.build()(1.5) == pytest.approx(2.25, abs=0.1)
    assert CurvaturePreset.parse({"kind": "zero"}, "k").build().is_identically_zero
    sinusoid = CurvaturePreset.parse({"kind": "sinusoid", "a": 1, "b": 2}, "k")
    assert dict(sinusoid.params)["omega"] == 1.0
    assert sinusoid.to_dict() == {"kind": "sinusoid", "a": 1.0, "b": 2.0, "omega": 1.0}


def test_config_summary_is_json_ready():
    summary = config_summary(RunConfig())
    assert summary["family"] == "timelike"
    assert summary["curvatures"]["k2"] == {"kind": "constant", "c": 0.2}
    json.dumps(summary)


@pytest.mark.parametrize("value, text", [
    (0.1, "1.0000000000000001e-01"),
    (-2.0, "-2.0000000000000000e+00"),
    (math.nan, "nan"),
    (math.inf, "inf"),
    (-math.inf, "-inf"),
])
def test_format_float(value, text):
    assert format_float(value) == text
    if math.isfinite(value):
        assert float(text) == value


def test_atomic_write_leaves_no_temporary_files(tmp_path):
    target = tmp_path / "nested" / "report.txt"
    atomic_write_text(target, "\033[32mok\033[0m\n")
    assert target.read_text(encoding="utf-8") == "ok\n"
    atomic_write_text(target, "again\n")
    assert [p.name for p in target.parent.iterdir()] == ["report.txt"]


def test_atomic_write_failure_keeps_previous_content(tmp_path):
    target = tmp_path / "report.txt"
    target.write_text("old", encoding="utf-8")
    with pytest.raises(TypeError):
        atomic_write_text(target, None)
    assert target.read_text(encoding="utf-8") == "old"
    assert [p.name for p in tmp_path.iterdir()] == ["report.txt"]


def test_write_csv_and_json(tmp_path):
    path = write_csv(tmp_path / "t.csv", ["a", "b", "c"], [(1, 0.5, True), ("x", math.nan, False)])
    assert path.read_text(encoding="utf-8").splitlines() == [
        "a,b,c", "1,5.0000000000000000e-01,1", "x,nan,0"]
    data = json.loads(write_json(tmp_path / "t.json", {"b": 1, "a": [1.5]}).read_text())
    assert data == {"a": [1.5], "b": 1}
