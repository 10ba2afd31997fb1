"""
Run configuration - one JSON document, every field optional, unknown keys rejected
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from geometry.frenet import CurvatureFunction, CurvatureFunctions, constant, sinusoid, table, zero
from geometry.tubes import ALL_FAMILIES, TubeFamily


class ConfigError(ValueError):
    """Invalid configuration; carries the dotted field path and, for syntax errors, the position"""

    def __init__(self, message: str, field_path: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        self.field_path = field_path
        self.line = line
        self.column = column
        where = []
        if field_path:
            where.append(f"field '{field_path}'")
        if line is not None:
            where.append(f"line {line}, column {column}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(f"{prefix}{message}")


def _check_keys(data: Dict, allowed, path: str):
    if not isinstance(data, dict):
        raise ConfigError("expected an object", path or None)
    for key in data:
        if key not in allowed:
            raise ConfigError("unknown key", _join(path, key))


def _join(path: str, key) -> str:
    return f"{path}.{key}" if path else str(key)


def _number(data: Dict, key: str, path: str, default: float, positive: bool = False) -> float:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError("expected a finite number", _join(path, key))
    if positive and not value > 0:
        raise ConfigError("must be positive", _join(path, key))
    return float(value)


def _integer(data: Dict, key: str, path: str, default: int, minimum: int) -> int:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError("expected an integer", _join(path, key))
    if value < minimum:
        raise ConfigError(f"must be at least {minimum}", _join(path, key))
    return value


@dataclass(frozen=True)
class CurvaturePreset:
    """Named curvature preset as written in the config"""

    kind: str = "zero"
    params: Tuple[Tuple[str, Any], ...] = ()

    def build(self) -> CurvatureFunction:
        p = dict(self.params)
        if self.kind == "zero":
            return zero()
        if self.kind == "constant":
            return constant(p["c"])
        if self.kind == "sinusoid":
            return sinusoid(p["a"], p["b"], p.get("omega", 1.0))
        return table(p["s"], p["values"])

    def to_dict(self) -> dict:
        return {"kind": self.kind, **{k: (list(v) if isinstance(v, tuple) else v)
                                      for k, v in self.params}}

    @classmethod
    def parse(cls, data, path: str) -> "CurvaturePreset":
        if not isinstance(data, dict) or "kind" not in data:
            raise ConfigError("expected an object with a 'kind'", path)
        kind = data["kind"]
        if kind == "zero":
            _check_keys(data, {"kind"}, path)
            return cls("zero")
        if kind == "constant":
            _check_keys(data, {"kind", "c"}, path)
            return cls("constant", (("c", _number(data, "c", path, 0.0)),))
        if kind == "sinusoid":
            _check_keys(data, {"kind", "a", "b", "omega"}, path)
            return cls("sinusoid", (("a", _number(data, "a", path, 0.0)),
                                    ("b", _number(data, "b", path, 0.0)),
                                    ("omega", _number(data, "omega", path, 1.0))))
        if kind == "table":
            _check_keys(data, {"kind", "s", "values"}, path)
            s, values = data.get("s"), data.get("values")
            for key, seq in (("s", s), ("values", values)):
                if not isinstance(seq, list) or len(seq) < 3:
                    raise ConfigError("expected a list of at least 3 numbers", _join(path, key))
                if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in seq):
                    raise ConfigError("expected numbers", _join(path, key))
            if len(s) != len(values):
                raise ConfigError("'s' and 'values' differ in length", path)
            if any(b <= a for a, b in zip(s, s[1:])):
                raise ConfigError("samples must be strictly increasing", _join(path, "s"))
            return cls("table", (("s", tuple(map(float, s))), ("values", tuple(map(float, values)))))
        raise ConfigError(f"unknown curvature kind {kind!r}", _join(path, "kind"))


@dataclass(frozen=True)
class CurvatureSet:
    k1: CurvaturePreset = CurvaturePreset("sinusoid", (("a", 0.3), ("b", 0.1), ("omega", 1.0)))
    k2: CurvaturePreset = CurvaturePreset("constant", (("c", 0.2),))
    k3: CurvaturePreset = CurvaturePreset("constant", (("c", 0.1),))

    def build(self) -> CurvatureFunctions:
        return CurvatureFunctions(self.k1.build(), self.k2.build(), self.k3.build())

    @property
    def label(self) -> str:
        return ", ".join(f"{name}={preset.build().label}"
                         for name, preset in (("k1", self.k1), ("k2", self.k2), ("k3", self.k3)))

    def to_dict(self) -> dict:
        return {"k1": self.k1.to_dict(), "k2": self.k2.to_dict(), "k3": self.k3.to_dict()}

    @classmethod
    def parse(cls, data, path: str, base: Optional["CurvatureSet"] = None) -> "CurvatureSet":
        base = base or cls()
        _check_keys(data, {"k1", "k2", "k3"}, path)
        presets = {}
        for name in ("k1", "k2", "k3"):
            if name in data:
                presets[name] = CurvaturePreset.parse(data[name], _join(path, name))
            else:
                presets[name] = getattr(base, name)
        return cls(**presets)


def default_witnesses() -> Tuple[CurvatureSet, ...]:
    return (
        CurvatureSet(k1=CurvaturePreset("constant", (("c", 0.2),))),
        CurvatureSet(),
    )


@dataclass(frozen=True)
class Tolerances:
    frame_tol: float = 1e-8
    class_tol: float = 1e-6
    reg_tol: float = 1e-3
    metric_tol: float = 1e-9
    agreement_tol: float = 1e-6
    zero_function_tol: float = 1e-10
    causal_tol: float = 1e-12


@dataclass(frozen=True)
class GridSize:
    s: int = 12
    t: int = 12
    w: int = 12


@dataclass(frozen=True)
class MeshSettings:
    slices: int = 4
    t: int = 24
    w: int = 24


@dataclass(frozen=True)
class FitConfig:
    radii: Tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0)
    directions: int = 48
    max_iterations: int = 10000


@dataclass(frozen=True)
class SuiteConfig:
    zero_witness: bool = True
    witnesses: Tuple[CurvatureSet, ...] = field(default_factory=default_witnesses)


@dataclass(frozen=True)
class RunConfig:
    family: TubeFamily = TubeFamily.timelike()
    families: Tuple[TubeFamily, ...] = ALL_FAMILIES
    r: float = 0.5
    curvatures: CurvatureSet = CurvatureSet()
    s_range: Tuple[float, float] = (0.0, 2 * math.pi)
    grid: GridSize = GridSize()
    frame_step: float = 1e-3
    fd_step: float = 1e-5
    richardson: bool = True
    tolerances: Tolerances = Tolerances()
    mesh: MeshSettings = MeshSettings()
    fit: FitConfig = FitConfig()
    suite: SuiteConfig = SuiteConfig()
    operator_source: str = "numeric"
    output_dir: str = "out"
    seed: int = 0
    threads: int = 1
    verbose: bool = False


def _parse_family(data, path: str) -> TubeFamily:
    if data == "timelike":
        return TubeFamily.timelike()
    if isinstance(data, dict):
        _check_keys(data, {"j", "lambda"}, path)
        j, lam = data.get("j"), data.get("lambda")
        if j not in (2, 3, 4) or isinstance(j, bool):
            raise ConfigError("j must be 2, 3 or 4", _join(path, "j"))
        if lam not in (1, -1) or isinstance(lam, bool):
            raise ConfigError("lambda must be 1 or -1", _join(path, "lambda"))
        return TubeFamily.spacelike(j, lam)
    raise ConfigError("expected \"timelike\" or {\"j\": .., \"lambda\": ..}", path)


def _parse_flat(cls, data, path: str, spec: Dict[str, Tuple[str, Any]]):
    """Parse a flat object of numbers; spec maps key -> ('float'|'int', extra)"""
    _check_keys(data, set(spec), path)
    values = {}
    for key, (kind, extra) in spec.items():
        default = getattr(cls(), key)
        if kind == "float":
            values[key] = _number(data, key, path, default, positive=True)
        else:
            values[key] = _integer(data, key, path, default, extra)
    return cls(**values)


def parse_config(data: Dict) -> RunConfig:
    """Validate a decoded JSON object into a RunConfig"""
    _check_keys(data, set(RunConfig.__dataclass_fields__) - {"verbose"}, "")
    d = RunConfig()
    values: Dict[str, Any] = {}

    if "family" in data:
        values["family"] = _parse_family(data["family"], "family")
    if "families" in data:
        raw = data["families"]
        if raw == "all":
            values["families"] = ALL_FAMILIES
        elif isinstance(raw, list) and raw:
            values["families"] = tuple(_parse_family(x, f"families[{i}]") for i, x in enumerate(raw))
        else:
            raise ConfigError("expected \"all\" or a non-empty list", "families")
    values["r"] = _number(data, "r", "", d.r, positive=True)
    if "curvatures" in data:
        values["curvatures"] = CurvatureSet.parse(data["curvatures"], "curvatures")
    if "s_range" in data:
        rng = data["s_range"]
        if (not isinstance(rng, list) or len(rng) != 2
                or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in rng)):
            raise ConfigError("expected [s0, s1]", "s_range")
        if not rng[1] > rng[0]:
            raise ConfigError("s1 must exceed s0", "s_range")
        values["s_range"] = (float(rng[0]), float(rng[1]))
    if "grid" in data:
        values["grid"] = _parse_flat(GridSize, data["grid"], "grid",
                                     {"s": ("int", 2), "t": ("int", 2), "w": ("int", 2)})
    values["frame_step"] = _number(data, "frame_step", "", d.frame_step, positive=True)
    values["fd_step"] = _number(data, "fd_step", "", d.fd_step, positive=True)
    if "richardson" in data:
        if not isinstance(data["richardson"], bool):
            raise ConfigError("expected true or false", "richardson")
        values["richardson"] = data["richardson"]
    if "tolerances" in data:
        values["tolerances"] = _parse_flat(Tolerances, data["tolerances"], "tolerances",
                                           {k: ("float", None) for k in Tolerances.__dataclass_fields__})
    if "mesh" in data:
        values["mesh"] = _parse_flat(MeshSettings, data["mesh"], "mesh",
                                     {"slices": ("int", 1), "t": ("int", 2), "w": ("int", 2)})
    if "fit" in data:
        values["fit"] = _parse_fit(data["fit"])
    if "suite" in data:
        values["suite"] = _parse_suite(data["suite"], values.get("curvatures", d.curvatures))
    if "operator_source" in data:
        if data["operator_source"] not in ("numeric", "closed"):
            raise ConfigError("expected \"numeric\" or \"closed\"", "operator_source")
        values["operator_source"] = data["operator_source"]
    if "output_dir" in data:
        if not isinstance(data["output_dir"], str) or not data["output_dir"]:
            raise ConfigError("expected a non-empty path", "output_dir")
        values["output_dir"] = data["output_dir"]
    values["seed"] = _integer(data, "seed", "", d.seed, 0)
    values["threads"] = _integer(data, "threads", "", d.threads, 1)
    return RunConfig(**values)


def _parse_fit(data) -> FitConfig:
    _check_keys(data, {"radii", "directions", "max_iterations"}, "fit")
    d = FitConfig()
    radii = data.get("radii", list(d.radii))
    if (not isinstance(radii, list) or not radii
            or any(isinstance(x, bool) or not isinstance(x, (int, float)) or x <= 0 for x in radii)):
        raise ConfigError("expected a non-empty list of positive numbers", "fit.radii")
    return FitConfig(
        radii=tuple(float(x) for x in radii),
        directions=_integer(data, "directions", "fit", d.directions, 1),
        max_iterations=_integer(data, "max_iterations", "fit", d.max_iterations, 1),
    )


def _parse_suite(data, base: CurvatureSet) -> SuiteConfig:
    _check_keys(data, {"zero_witness", "witnesses"}, "suite")
    zero_witness = data.get("zero_witness", True)
    if not isinstance(zero_witness, bool):
        raise ConfigError("expected true or false", "suite.zero_witness")
    if "witnesses" not in data:
        return SuiteConfig(zero_witness=zero_witness)
    raw = data["witnesses"]
    if not isinstance(raw, list):
        raise ConfigError("expected a list", "suite.witnesses")
    witnesses = tuple(CurvatureSet.parse(x, f"suite.witnesses[{i}]", base) for i, x in enumerate(raw))
    return SuiteConfig(zero_witness=zero_witness, witnesses=witnesses)


def load_config(path: Optional[str]) -> RunConfig:
    """
    Read and validate a JSON config file; None gives the defaults

    Raises:
        ConfigError: on syntax errors (with line and column) or invalid fields
        OSError: if the file cannot be read
    """
    if path is None:
        return RunConfig()
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(e.msg, line=e.lineno, column=e.colno) from e
    if not isinstance(data, dict):
        raise ConfigError("top level must be an object", line=1, column=1)
    return parse_config(data)


def config_summary(config: RunConfig) -> Dict[str, Any]:
    """JSON-ready echo of the settings that shape a report"""
    return {
        "family": config.family.to_selector(),
        "r": config.r,
        "curvatures": config.curvatures.to_dict(),
        "s_range": list(config.s_range),
        "grid": {"s": config.grid.s, "t": config.grid.t, "w": config.grid.w},
        "frame_step": config.frame_step,
        "fd_step": config.fd_step,
        "richardson": config.richardson,
        "operator_source": config.operator_source,
        "seed": config.seed,
    }
