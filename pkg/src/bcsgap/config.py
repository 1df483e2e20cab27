"""Run configuration: an INI file with sections material, grid, solver, sweep,
output and (optionally) asymptotics.

Every key is validated at load time and unknown sections or keys are
rejected. Errors are raised as :class:`ConfigError` carrying the dotted name
of the offending key, e.g. ``material.epsilon``.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BCSError, ConfigError
from .gap_solver import DEFAULT_MAX_ITER, DEFAULT_TOL
from .potential import (ConstantKernel, PotentialKernel, SeparableKernel, load_tabulated_csv,
                        validate_kernel)
from .quad import DEFAULT_ORDER, DEFAULT_PANELS, EnergyGrid, build_grid
from .thermo import MaterialSpec

KERNEL_TYPES = ("constant", "separable", "tabulated")
FORMATS = ("csv", "json", "svg")

# key -> (parser, default); a default of None marks a required key
SCHEMA = {
    "material": {
        "epsilon": (float, None),
        "omega_cut": (float, None),
        "n0": (float, 1.0),
        "kernel": (str, None),
        "value": (float, ""),
        "coeffs": (str, ""),
        "table": (str, ""),
    },
    "grid": {
        "panels": (int, DEFAULT_PANELS),
        "order": (int, DEFAULT_ORDER),
    },
    "solver": {
        "tol": (float, DEFAULT_TOL),
        "max_iter": (int, DEFAULT_MAX_ITER),
        "damping": (float, 1.0),
    },
    "sweep": {
        "t_min": (float, 0.1),
        "t_max": (float, 0.9),
        "points": (int, 9),
        "spacing": (str, "linear"),
        "units": (str, "tc"),
    },
    "output": {
        "directory": (str, "output"),
        "formats": (str, "csv, json"),
    },
    "asymptotics": {
        "fractions": (str, "0.2, 0.1, 0.05"),
        "t0_threshold": (float, 1e-6),
    },
}


@dataclass(frozen=True)
class SweepConfig:
    t_min: float
    t_max: float
    points: int
    spacing: str
    units: str

    def temperatures(self, tc: float | None = None) -> np.ndarray:
        """Sweep temperatures in energy units; ``tc`` is needed when ``units = tc``."""
        if self.points == 1:
            t = np.array([self.t_min])
        elif self.spacing == "log":
            t = np.geomspace(self.t_min, self.t_max, self.points)
        else:
            t = np.linspace(self.t_min, self.t_max, self.points)
        if self.units == "tc":
            if tc is None:
                raise ConfigError("sweep in units of tc needs tc", "sweep.units")
            t = t * tc
        return t


@dataclass(frozen=True)
class RunConfig:
    path: Path
    material: MaterialSpec
    grid: EnergyGrid
    tol: float
    max_iter: int
    damping: float
    sweep: SweepConfig
    directory: Path
    formats: tuple
    fractions: tuple
    t0_threshold: float
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def kernel(self) -> PotentialKernel:
        return self.material.kernel


def _parse_list(text: str, key: str) -> list:
    parts = [p.strip() for p in text.replace(";", ",").split(",")]
    return [p for p in parts if p]


def _floats(text: str, key: str) -> tuple:
    try:
        vals = tuple(float(p) for p in _parse_list(text, key))
    except ValueError:
        raise ConfigError(f"{key}: expected a comma-separated list of numbers, got {text!r}", key) from None
    if not vals:
        raise ConfigError(f"{key}: empty list", key)
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"{key}: values must be finite", key)
    return vals


def _read_raw(path: Path) -> dict:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    parser.optionxform = str
    try:
        with path.open() as fh:
            parser.read_file(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found", "path") from None
    except configparser.Error as exc:
        raise ConfigError(f"{path}: cannot parse ({exc.__class__.__name__}: {exc})", "file") from None

    raw = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", section)
        raw[section] = {}
        for key, value in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}", f"{section}.{key}")
            raw[section][key] = value
    for section, keys in SCHEMA.items():
        for key, (conv, default) in keys.items():
            name = f"{section}.{key}"
            text = raw.get(section, {}).get(key)
            if text is None:
                if default is None:
                    raise ConfigError(f"missing required key {name}", name)
                raw.setdefault(section, {})[key] = default
                continue
            try:
                value = conv(text)
            except ValueError:
                raise ConfigError(f"{name}: cannot read {text!r} as {conv.__name__}", name) from None
            if isinstance(value, float) and not math.isfinite(value):
                raise ConfigError(f"{name}: must be finite, got {text!r}", name)
            raw[section][key] = value
    return raw


def _kernel(m: dict, base: Path) -> PotentialKernel:
    kind = m["kernel"].strip().lower()
    if kind not in KERNEL_TYPES:
        raise ConfigError(f"material.kernel must be one of {', '.join(KERNEL_TYPES)}, got {kind!r}",
                          "material.kernel")
    if kind == "constant":
        if m["value"] == "":
            raise ConfigError("constant kernel needs material.value", "material.value")
        if not m["value"] > 0:
            raise ConfigError(f"material.value must be > 0, got {m['value']}", "material.value")
        return ConstantKernel(m["value"])
    if kind == "separable":
        if not m["coeffs"]:
            raise ConfigError("separable kernel needs material.coeffs", "material.coeffs")
        return SeparableKernel(_floats(m["coeffs"], "material.coeffs"))
    if not m["table"]:
        raise ConfigError("tabulated kernel needs material.table", "material.table")
    table = Path(m["table"])
    if not table.is_absolute():
        table = base / table
    if not table.exists():
        raise ConfigError(f"kernel table {table} not found", "material.table")
    try:
        return load_tabulated_csv(table)
    except BCSError as exc:
        raise ConfigError(f"material.table: {exc}", "material.table") from exc


def load_config(path) -> RunConfig:
    """Parse and validate a run configuration."""
    path = Path(path)
    raw = _read_raw(path)
    m = raw["material"]

    eps, b = m["epsilon"], m["omega_cut"]
    if not eps > 0:
        raise ConfigError(f"material.epsilon must be > 0, got {eps}", "material.epsilon")
    if not b > eps:
        raise ConfigError(f"material.epsilon must be below material.omega_cut, got {eps} >= {b}",
                          "material.epsilon")
    if not m["n0"] > 0:
        raise ConfigError(f"material.n0 must be > 0, got {m['n0']}", "material.n0")

    g = raw["grid"]
    for key, lo in (("panels", 1), ("order", 2)):
        if g[key] < lo:
            raise ConfigError(f"grid.{key} must be >= {lo}, got {g[key]}", f"grid.{key}")
    grid = build_grid(eps, b, panels=g["panels"], order=g["order"])

    kernel = _kernel(m, path.parent)
    try:
        validate_kernel(kernel, grid)
    except BCSError as exc:
        raise ConfigError(f"material.kernel: {exc}", "material.kernel") from exc
    material = MaterialSpec(eps, b, m["n0"], kernel)

    s = raw["solver"]
    if not s["tol"] > 0:
        raise ConfigError(f"solver.tol must be > 0, got {s['tol']}", "solver.tol")
    if s["max_iter"] < 1:
        raise ConfigError(f"solver.max_iter must be >= 1, got {s['max_iter']}", "solver.max_iter")
    if not 0 < s["damping"] <= 1:
        raise ConfigError(f"solver.damping must lie in (0, 1], got {s['damping']}", "solver.damping")

    w = raw["sweep"]
    spacing, units = w["spacing"].strip().lower(), w["units"].strip().lower()
    if spacing not in ("linear", "log"):
        raise ConfigError(f"sweep.spacing must be linear or log, got {spacing!r}", "sweep.spacing")
    if units not in ("tc", "absolute"):
        raise ConfigError(f"sweep.units must be tc or absolute, got {units!r}", "sweep.units")
    if w["points"] < 1:
        raise ConfigError(f"sweep.points must be >= 1, got {w['points']}", "sweep.points")
    if not w["t_min"] > 0:
        raise ConfigError(f"sweep.t_min must be > 0, got {w['t_min']}", "sweep.t_min")
    if not (w["t_max"] > w["t_min"] or (w["points"] == 1 and w["t_max"] >= w["t_min"])):
        raise ConfigError(f"sweep.t_max must exceed sweep.t_min, got {w['t_max']}", "sweep.t_max")
    sweep = SweepConfig(w["t_min"], w["t_max"], w["points"], spacing, units)

    o = raw["output"]
    formats = tuple(f.lower() for f in _parse_list(o["formats"], "output.formats"))
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        raise ConfigError(f"output.formats: unknown format {bad[0]!r}", "output.formats")
    directory = Path(o["directory"])
    if not directory.is_absolute():
        directory = path.parent / directory

    a = raw["asymptotics"]
    fractions = _floats(a["fractions"], "asymptotics.fractions")
    if not all(0 < f < 1 for f in fractions):
        raise ConfigError("asymptotics.fractions must lie in (0, 1)", "asymptotics.fractions")
    if not 0 < a["t0_threshold"] < 1:
        raise ConfigError("asymptotics.t0_threshold must lie in (0, 1)", "asymptotics.t0_threshold")

    return RunConfig(path, material, grid, s["tol"], s["max_iter"], s["damping"], sweep,
                     directory, formats, fractions, a["t0_threshold"], raw)
