"""Pairing kernels U(x, xi) for the gap equation.

Three families are supported: a constant, a separable product g(x) g(xi)
with polynomial g, and a table interpolated bilinearly. Only positivity and
continuity are required; symmetry is not assumed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import KernelDomainError, ParameterError, PositivityError
from .quad import EnergyGrid


@dataclass(frozen=True)
class ConstantKernel:
    value: float

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ParameterError("constant kernel value must be finite")

    def __call__(self, x, xi):
        x, xi = np.broadcast_arrays(np.asarray(x, float), np.asarray(xi, float))
        return np.full(x.shape, float(self.value))

    def matrix(self, x, xi):
        return np.full((len(x), len(xi)), float(self.value))


@dataclass(frozen=True)
class SeparableKernel:
    """``U(x, xi) = g(x) g(xi)`` with ``g(e) = sum_k coeffs[k] * e**k``."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise ParameterError("separable kernel needs at least one coefficient")

    def g(self, e):
        return np.polynomial.polynomial.polyval(np.asarray(e, float), self.coeffs)

    def __call__(self, x, xi):
        return self.g(x) * self.g(xi)

    def matrix(self, x, xi):
        return np.outer(self.g(x), self.g(xi))


@dataclass(frozen=True, eq=False)
class TabulatedKernel:
    """Bilinear interpolation of ``values[i, j] = U(x_knots[i], xi_knots[j])``."""

    x_knots: np.ndarray
    xi_knots: np.ndarray
    values: np.ndarray
    _interp: RegularGridInterpolator = field(init=False, repr=False)

    def __post_init__(self):
        x = np.array(self.x_knots, dtype=float)
        xi = np.array(self.xi_knots, dtype=float)
        v = np.array(self.values, dtype=float)
        if x.ndim != 1 or xi.ndim != 1 or len(x) < 2 or len(xi) < 2:
            raise ParameterError("tabulated kernel needs at least two knots per axis")
        if v.shape != (len(x), len(xi)):
            raise ParameterError(f"values shape {v.shape} does not match knots ({len(x)}, {len(xi)})")
        if np.any(np.diff(x) <= 0) or np.any(np.diff(xi) <= 0):
            raise ParameterError("tabulated kernel knots must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ParameterError("tabulated kernel values must be finite")
        for arr in (x, xi, v):
            arr.setflags(write=False)
        object.__setattr__(self, "x_knots", x)
        object.__setattr__(self, "xi_knots", xi)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "_interp", RegularGridInterpolator((x, xi), v, method="linear"))

    @property
    def span(self):
        return (max(self.x_knots[0], self.xi_knots[0]), min(self.x_knots[-1], self.xi_knots[-1]))

    def __call__(self, x, xi):
        x, xi = np.broadcast_arrays(np.asarray(x, float), np.asarray(xi, float))
        bad = ((x < self.x_knots[0]) | (x > self.x_knots[-1])
               | (xi < self.xi_knots[0]) | (xi > self.xi_knots[-1]))
        if np.any(bad):
            i = np.flatnonzero(bad.ravel())[0]
            raise KernelDomainError(
                f"({x.ravel()[i]}, {xi.ravel()[i]}) lies outside the tabulated square")
        pts = np.stack([x.ravel(), xi.ravel()], axis=-1)
        return self._interp(pts).reshape(x.shape)

    def matrix(self, x, xi):
        xx, yy = np.meshgrid(np.asarray(x, float), np.asarray(xi, float), indexing="ij")
        return self(xx, yy)


PotentialKernel = Union[ConstantKernel, SeparableKernel, TabulatedKernel]


def eval_kernel(kernel: PotentialKernel, x, xi, band=None):
    """Evaluate ``U(x, xi)``; with ``band=(eps, b)`` arguments are range-checked."""
    if band is not None:
        lo, hi = band
        for name, arg in (("x", x), ("xi", xi)):
            a = np.asarray(arg, float)
            if np.any((a < lo) | (a > hi)):
                raise KernelDomainError(f"{name}={arg!r} outside the band [{lo}, {hi}]")
    out = kernel(x, xi)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class KernelValidation:
    min_value: float
    location: tuple
    points_checked: int


def validate_kernel(kernel: PotentialKernel, grid: EnergyGrid) -> KernelValidation:
    """Check ``U > 0`` on the node and panel-edge product set of ``grid``.

    Raises :class:`PositivityError` naming the worst location; tables are
    additionally checked entry by entry inside the band.
    """
    if isinstance(kernel, TabulatedKernel):
        lo, hi = kernel.span
        tol = 1e-12 * max(1.0, abs(grid.omega_cut))
        if lo > grid.epsilon + tol or hi < grid.omega_cut - tol:
            raise KernelDomainError(
                f"tabulated knots span [{lo}, {hi}] but the band is "
                f"[{grid.epsilon}, {grid.omega_cut}]")
        xs, xis = kernel.x_knots, kernel.xi_knots
        inside = np.outer((xs >= grid.epsilon) & (xs <= grid.omega_cut),
                          (xis >= grid.epsilon) & (xis <= grid.omega_cut))
        bad = inside & (kernel.values <= 0)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise PositivityError(
                f"tabulated kernel entry at cell (row {i}, col {j}), "
                f"(x, xi) = ({xs[i]}, {xis[j]}) is {kernel.values[i, j]} <= 0")

    pts = np.union1d(grid.nodes, grid.edges)
    m = np.asarray(kernel.matrix(pts, pts), float)
    k = int(np.argmin(m))
    i, j = np.unravel_index(k, m.shape)
    min_value = float(m[i, j])
    location = (float(pts[i]), float(pts[j]))
    if not min_value > 0:
        raise PositivityError(f"kernel is not positive: U{location} = {min_value}")
    return KernelValidation(min_value, location, m.size)


def load_tabulated_csv(path) -> TabulatedKernel:
    """Read a kernel table: first row xi knots, first column x knots, body values.

    The top-left cell is ignored (it may hold a label).
    """
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if len(rows) < 3:
        raise ParameterError(f"{path}: a kernel table needs a header row and at least two data rows")
    try:
        xi = [float(c) for c in rows[0][1:]]
        x = [float(r[0]) for r in rows[1:]]
        body = [[float(c) for c in r[1:]] for r in rows[1:]]
    except ValueError as exc:
        raise ParameterError(f"{path}: non-numeric entry ({exc})") from None
    if any(len(r) != len(xi) for r in body):
        raise ParameterError(f"{path}: ragged kernel table")
    return TabulatedKernel(np.array(x), np.array(xi), np.array(body))
