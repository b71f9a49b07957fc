"""Run configuration: INI-style file with sections, flat unique keys.

Every key can be overridden by a command-line flag of the same name.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
from dataclasses import dataclass
from pathlib import Path

from .charts import CHART_NAMES
from .errors import ConfigError


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(",", " ").split())


@dataclass(frozen=True)
class RunConfig:
    # geometry
    radius: float = 1.0
    radii: tuple[float, ...] = (0.5, 1.0, 2.0)
    chart: str = "static-47-corrected"
    # numerics
    step: float = 1e-5
    curvature_step: float = 1e-4
    richardson: bool = True
    tol_first: float = 1e-6
    tol_second: float = 1e-4
    tol_integrator: float = 1e-8
    # sampling
    seed: int = 0
    samples: int = 100
    planes: int = 200
    killing_points: int = 50
    rank_points: int = 20
    table_points: int = 20
    roundtrip_points: int = 1000
    pullback_points: int = 200
    # geodesics
    geodesics: int = 20
    tau_end: float = 10.0
    dt: float = 1e-3
    sample_every: int = 10
    speed: float = 0.05
    boundary_margin: float = 0.1
    x0: tuple[float, ...] = (0.0, 0.5, 1.5707963267948966, 0.0)
    v0: tuple[float, ...] = (1.0, 0.0, 0.0, 0.0)
    # comparison theorem
    lct_dim: int = 4
    r_min: float = 0.1
    r_max: float = 5.0
    r_count: int = 50
    sphere_r_max: float = 3.0415926535897931
    bochner_radii: int = 20
    # output
    out: str = ""
    csv: str = "trajectory.csv"

    def validate(self) -> "RunConfig":
        if not self.radius > 0 or not all(r > 0 for r in self.radii) or not self.radii:
            raise ConfigError("radius values must be positive")
        for name in ("step", "curvature_step"):
            h = getattr(self, name)
            if not 1e-9 < h < 1e-2:
                raise ConfigError(f"{name} must lie in (1e-9, 1e-2), got {h:g}")
        if self.chart not in CHART_NAMES:
            raise ConfigError(f"unknown chart {self.chart!r}; choose from {', '.join(CHART_NAMES)}")
        counts = (
            "samples", "planes", "killing_points", "rank_points", "table_points",
            "roundtrip_points", "pullback_points", "geodesics", "sample_every", "r_count",
            "bochner_radii",
        )
        for name in counts:
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if not self.dt > 0 or self.tau_end < 0:
            raise ConfigError("dt must be positive and tau_end non-negative")
        if not 0 < self.r_min < self.r_max:
            raise ConfigError("need 0 < r_min < r_max")
        if not 0 <= self.boundary_margin < 1:
            raise ConfigError("boundary_margin is a fraction of the radius in [0, 1)")
        if len(self.x0) != len(self.v0):
            raise ConfigError("x0 and v0 need the same length")
        if self.lct_dim < 2:
            raise ConfigError("lct_dim must be at least 2")
        return self

    def as_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            val = getattr(self, f.name)
            out[f.name] = list(val) if isinstance(val, tuple) else val
        return out


SECTIONS = {
    "geometry": ("radius", "radii", "chart"),
    "numerics": ("step", "curvature_step", "richardson", "tol_first", "tol_second", "tol_integrator"),
    "sampling": (
        "seed", "samples", "planes", "killing_points", "rank_points", "table_points",
        "roundtrip_points", "pullback_points",
    ),
    "geodesic": ("geodesics", "tau_end", "dt", "sample_every", "speed", "boundary_margin", "x0", "v0"),
    "lct": ("lct_dim", "r_min", "r_max", "r_count", "sphere_r_max", "bochner_radii"),
    "output": ("out", "csv"),
}

FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_DEFAULTS = RunConfig()


def parse_value(key: str, text: str):
    """Convert a string from a config file or a flag to the field's type."""
    default = getattr(_DEFAULTS, key)
    try:
        if isinstance(default, bool):
            low = text.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if isinstance(default, tuple):
            return _floats(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        return str(text)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {text!r}") from None


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then the file (if any), then explicit overrides; validated."""
    values: dict = {}
    if path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        known = {k: sec for sec, keys in SECTIONS.items() for k in keys}
        for section in parser.sections():
            if section not in SECTIONS:
                raise ConfigError(f"unknown section [{section}] in {path}")
            for key, text in parser.items(section):
                if known.get(key) != section:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                values[key] = parse_value(key, text)
    for key, val in (overrides or {}).items():
        if key not in FIELD_TYPES:
            raise ConfigError(f"unknown setting {key!r}")
        values[key] = parse_value(key, val) if isinstance(val, str) else val
    return RunConfig(**values).validate()


def dump_config(cfg: RunConfig) -> str:
    parser = configparser.ConfigParser()
    for section, keys in SECTIONS.items():
        parser[section] = {}
        for key in keys:
            val = getattr(cfg, key)
            if isinstance(val, tuple):
                text = ", ".join(repr(v) for v in val)
            elif isinstance(val, bool):
                text = "true" if val else "false"
            else:
                text = str(val)
            parser[section][key] = text
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()

