"""Experiment configuration files.

An experiment is an INI file::

    [experiment]
    version = 1
    case = planar_funnel_symmetric
    output = results.csv        ; "-" or empty for standard output

    [geometry]
    eps = 0.05
    Rc = 1.0
    area = 3.141592653589793

    [sim]
    dt = 1e-3
    n_paths = 2000
    seed = 7
    max_time = 1e4
    adaptive = true
    refine_factor = 64
    workers =                   ; empty: NARROW_ESCAPE_WORKERS or all cores

    [sweep]
    param = eps
    values = 0.05, 0.025, 0.0125

    [compare]
    z_bound = 3
    ratio_tol = 0.25

Geometry keys depend on the case (see :mod:`narrow_escape.harness`).
Writing a config and reading it back gives an equal object.
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from .mc.params import SimParams

CONFIG_VERSION = 1


class ConfigError(ValueError):
    pass


def _num(text: str, key: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: value must be finite")
    return v


def parse_values(text: str, key: str = "values") -> tuple:
    vals = tuple(_num(t, key) for t in text.replace(",", " ").split())
    for v in vals:
        if not v > 0:
            raise ConfigError(f"{key}: sweep values must be positive, got {v}")
    return vals


@dataclass(frozen=True)
class ExperimentConfig:
    case: str
    geometry: dict = field(default_factory=dict)
    sim: SimParams = SimParams()
    sweep_param: Optional[str] = None
    sweep_values: tuple = ()
    output: str = "-"
    z_bound: float = 3.0
    ratio_tol: float = 0.25

    def __post_init__(self):
        from .harness import CASES

        if self.case not in CASES:
            raise ConfigError(f"unknown case {self.case!r}; known: {', '.join(sorted(CASES))}")
        geo = {str(k): float(v) for k, v in self.geometry.items()}
        for k, v in geo.items():
            if not math.isfinite(v):
                raise ConfigError(f"geometry value {k} must be finite")
        object.__setattr__(self, "geometry", geo)
        vals = tuple(float(v) for v in self.sweep_values)
        if self.sweep_param is not None:
            if not vals:
                raise ConfigError("sweep has no values")
            for v in vals:
                if not (v > 0 and math.isfinite(v)):
                    raise ConfigError(f"sweep values must be finite and positive, got {v}")
        object.__setattr__(self, "sweep_values", vals)

    # -- text form --------------------------------------------------------

    def to_ini(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        cp["experiment"] = {"version": str(CONFIG_VERSION), "case": self.case, "output": self.output}
        cp["geometry"] = {k: repr(float(v)) for k, v in self.geometry.items()}
        s = asdict(self.sim)
        s["workers"] = "" if s["workers"] is None else s["workers"]
        cp["sim"] = {k: (str(v).lower() if isinstance(v, bool) else repr(float(v)) if isinstance(v, float) else str(v))
                     for k, v in s.items()}
        if self.sweep_param is not None:
            cp["sweep"] = {"param": self.sweep_param, "values": ", ".join(repr(float(v)) for v in self.sweep_values)}
        cp["compare"] = {"z_bound": repr(float(self.z_bound)), "ratio_tol": repr(float(self.ratio_tol))}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "ExperimentConfig":
        cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(str(exc)) from None
        if "experiment" not in cp:
            raise ConfigError("missing [experiment] section")
        ex = cp["experiment"]
        version = int(_num(ex.get("version", ""), "version")) if ex.get("version") else None
        if version != CONFIG_VERSION:
            raise ConfigError(f"unsupported config version {version!r} (expected {CONFIG_VERSION})")
        if not ex.get("case"):
            raise ConfigError("missing case")
        geo = {k: _num(v, k) for k, v in cp["geometry"].items()} if "geometry" in cp else {}
        sim = SimParams()
        if "sim" in cp:
            sim = sim_from_mapping(cp["sim"])
        sweep_param, sweep_values = None, ()
        if "sweep" in cp:
            sw = cp["sweep"]
            sweep_param = sw.get("param") or None
            if sweep_param is None:
                raise ConfigError("[sweep] needs a param key")
            sweep_values = parse_values(sw.get("values", ""))
        cmp = cp["compare"] if "compare" in cp else {}
        return cls(
            case=ex["case"].strip(),
            geometry=geo,
            sim=sim,
            sweep_param=sweep_param,
            sweep_values=sweep_values,
            output=(ex.get("output") or "-").strip(),
            z_bound=_num(cmp.get("z_bound", "3"), "z_bound"),
            ratio_tol=_num(cmp.get("ratio_tol", "0.25"), "ratio_tol"),
        )

    @classmethod
    def read(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_ini(fh.read())

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_ini())


def sim_from_mapping(m) -> SimParams:
    kw = {}
    for key in ("dt", "max_time"):
        if m.get(key):
            kw[key] = _num(m[key], key)
    for key in ("n_paths", "seed", "refine_factor", "workers"):
        if m.get(key):
            kw[key] = int(_num(m[key], key))
    if m.get("adaptive"):
        txt = str(m["adaptive"]).strip().lower()
        if txt not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"adaptive: expected a boolean, got {m['adaptive']!r}")
        kw["adaptive"] = txt in ("true", "1", "yes")
    try:
        return SimParams(**kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
