"""Low-temperature forms of the entropy, specific heat and gap, and the
critical-field ratio H_c(0)**2 / (T_c C_V^N(T_c)).

All low-temperature forms take the zero-temperature profile u0(0, xi) and
replace every temperature derivative of the gap by zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator

from ._special import exp_neg, sech2
from .errors import ParameterError
from .gap_solver import GapSolution, du2_dT, kernel_matrix
from .quad import EnergyGrid, build_grid, integrate_half_line
from .thermo import MaterialSpec, d_omega_dT_formula, specific_heat_from_entropy

SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class AsymptoticReport:
    temperature: float
    s_lowT: float
    s_full: float
    cv_lowT: float
    cv_full: float
    gap_lowT: np.ndarray = field(repr=False)
    gap_full: np.ndarray = field(repr=False)
    relative_errors: dict = field(default_factory=dict)
    gap_correction_error: float = float("nan")


@dataclass(frozen=True)
class RatioReport:
    """``ratio`` uses the normal-state specific heat C_V^N(T_c) in the denominator."""

    tc: float
    hc0_sq: float
    cvn_tc: float
    ratio: float
    universal_limit: float
    deviation: float

    def to_dict(self) -> dict:
        return {
            "tc": self.tc,
            "hc0_squared": self.hc0_sq,
            "cv_normal_tc": self.cvn_tc,
            "ratio": self.ratio,
            "universal_limit": self.universal_limit,
            "deviation": self.deviation,
        }


def _zero_profile(sol: GapSolution, grid: EnergyGrid | None):
    grid = grid if grid is not None else sol.grid
    if grid is None:
        raise ParameterError("zero-temperature solution carries no grid")
    if sol.temperature != 0:
        raise ParameterError(f"expected the T = 0 solution, got T = {sol.temperature}")
    return grid, np.asarray(sol.values, float)


def entropy_lowT(spec: MaterialSpec, u0_zero: GapSolution, T: float, grid=None) -> float:
    if not T > 0:
        raise ParameterError(f"temperature must be > 0, got {T}")
    grid, u = _zero_profile(u0_zero, grid)
    E = np.hypot(grid.nodes, u)
    return 4.0 * spec.n0 / T * grid.integrate(E * exp_neg(E / T))


def cv_lowT(spec: MaterialSpec, u0_zero: GapSolution, T: float, grid=None) -> float:
    if not T > 0:
        raise ParameterError(f"temperature must be > 0, got {T}")
    grid, u = _zero_profile(u0_zero, grid)
    E = np.hypot(grid.nodes, u)
    return 4.0 * spec.n0 / T**2 * grid.integrate(E**2 * exp_neg(E / T))


def gap_lowT(spec: MaterialSpec, u0_zero: GapSolution, T: float, grid=None, kmat=None) -> np.ndarray:
    """``u0(0, x) - 2 int U(x, xi) exp(-E0(xi)/T) dxi`` at the grid nodes."""
    if not T > 0:
        raise ParameterError(f"temperature must be > 0, got {T}")
    grid, u = _zero_profile(u0_zero, grid)
    if kmat is None:
        kmat = kernel_matrix(spec.kernel, grid)
    E = np.hypot(grid.nodes, u)
    return u - 2.0 * kmat @ exp_neg(E / T)


# Constant-kernel closed forms, valid for eps << sqrt(T u0) and a wide band.

def entropy_lowT_constant(n0: float, delta: float, T: float) -> float:
    return 2.0 * SQRT_2PI * n0 * delta**1.5 / math.sqrt(T) * math.exp(-delta / T)


def cv_lowT_constant(n0: float, delta: float, T: float) -> float:
    return 2.0 * SQRT_2PI * n0 * delta**2.5 / T**1.5 * math.exp(-delta / T)


def gap_lowT_constant(u_const: float, delta: float, T: float) -> float:
    return delta - u_const * math.sqrt(2.0 * math.pi * T * delta) * math.exp(-delta / T)


def zero_T_profile(spec: MaterialSpec, u0_zero: GapSolution, grid=None) -> PchipInterpolator:
    """Monotone cubic interpolant of ``u0(0, .)`` over the closed band.

    Interior knots are the grid nodes; the band edges are filled in by
    evaluating the right-hand side of the gap equation there, so the
    interpolant never extrapolates.
    """
    grid, u = _zero_profile(u0_zero, grid)
    edges = np.array([grid.epsilon, grid.omega_cut])
    krow = np.asarray(spec.kernel.matrix(edges, grid.nodes), float) * grid.weights[None, :]
    E = np.hypot(grid.nodes, u)
    u_edges = krow @ (u / E)
    x = np.concatenate(([edges[0]], grid.nodes, [edges[1]]))
    y = np.concatenate(([u_edges[0]], u, [u_edges[1]]))
    return PchipInterpolator(x, y, extrapolate=False)


def _eta_grid(grid: EnergyGrid, tc: float) -> EnergyGrid:
    return build_grid(grid.epsilon / (2 * tc), grid.omega_cut / (2 * tc), grid.panels, grid.order)


def hc_integral(spec: MaterialSpec, u0_zero: GapSolution, tc: float, grid=None) -> float:
    """``int {sqrt(eta^2 + a^2) - eta}^2 / sqrt(eta^2 + a^2) d eta`` with ``a = u0(0, 2 tc eta) / 2 tc``."""
    if not tc > 0:
        raise ParameterError(f"tc must be > 0, got {tc}")
    grid, _ = _zero_profile(u0_zero, grid)
    profile = zero_T_profile(spec, u0_zero, grid)
    eg = _eta_grid(grid, tc)
    eta = eg.nodes
    a = profile(np.clip(2 * tc * eta, grid.epsilon, grid.omega_cut)) / (2 * tc)
    r = np.hypot(eta, a)
    # (r - eta)^2 / r written as a^4 / ((r + eta)^2 r) to avoid cancellation at large eta
    return eg.integrate(a**4 / ((r + eta) ** 2 * r))


def hc0_squared(spec: MaterialSpec, u0_zero: GapSolution, tc: float, grid=None) -> float:
    return 32.0 * math.pi * spec.n0 * tc**2 * hc_integral(spec, u0_zero, tc, grid)


def _sommerfeld_integral(lo: float, hi: float, grid: EnergyGrid) -> float:
    eg = build_grid(lo, hi, grid.panels, grid.order)
    return eg.integrate(eg.nodes**2 * sech2(eg.nodes))


def cvn_tc(spec: MaterialSpec, tc: float, grid: EnergyGrid | None = None) -> float:
    """Normal-state specific heat at ``tc``: ``8 tc N0 int eta^2 / cosh^2(eta)``."""
    if not tc > 0:
        raise ParameterError(f"tc must be > 0, got {tc}")
    if grid is None:
        grid = build_grid(spec.epsilon, spec.omega_cut)
    return 8.0 * tc * spec.n0 * _sommerfeld_integral(
        spec.epsilon / (2 * tc), spec.omega_cut / (2 * tc), grid)


@lru_cache(maxsize=None)
def universal_constants() -> dict:
    """Wide-band, zero-cutoff limits computed by half-line quadrature.

    ``gap_ratio`` is u0(0)/T_c = 4 exp(int ln(eta)/cosh^2(eta)) and ``ratio``
    the critical-field ratio 4 pi (a^2 / 2) / (pi^2 / 12) with a = gap_ratio / 2.
    """
    log_int = integrate_half_line(lambda e: np.log(e) * sech2(e))
    sommerfeld = integrate_half_line(lambda e: e**2 * sech2(e))
    gap_ratio = 4.0 * math.exp(log_int)
    a = gap_ratio / 2.0
    hc = integrate_half_line(lambda e: a**4 / ((np.hypot(e, a) + e) ** 2 * np.hypot(e, a)),
                             decay_scale=a)
    return {
        "log_integral": log_int,
        "sommerfeld": sommerfeld,
        "gap_ratio": gap_ratio,
        "hc_integral": hc,
        "ratio": 4.0 * math.pi * hc / sommerfeld,
    }


def universal_ratio(spec: MaterialSpec, u0_zero: GapSolution, tc: float, grid=None) -> RatioReport:
    grid, _ = _zero_profile(u0_zero, grid)
    hc_sq = hc0_squared(spec, u0_zero, tc, grid)
    cvn = cvn_tc(spec, tc, grid)
    ratio = hc_sq / (tc * cvn)
    limit = universal_constants()["ratio"]
    return RatioReport(tc, hc_sq, cvn, ratio, limit, (ratio - limit) / limit)


def _rel(a, b):
    return abs(a - b) / abs(b) if b != 0 else (0.0 if a == b else math.inf)


def build_report(spec: MaterialSpec, sweep, u0_zero: GapSolution, T_list,
                 cv_step: float | None = None) -> list[AsymptoticReport]:
    """Compare the low-temperature forms with full numerics at each ``T``.

    The full entropy comes from the seven-term derivative formula and the
    full specific heat from ``T dS/dT`` of that entropy; second differences
    of Omega are rounding-limited once ``T`` is a few percent of ``u0(0)``.
    Run the sweep at a tolerance near machine precision (1e-15).
    """
    grid = sweep.grid
    kmat = kernel_matrix(spec.kernel, grid)
    reports = []
    for T in T_list:
        T = float(T)
        s_low = entropy_lowT(spec, u0_zero, T, grid)
        c_low = cv_lowT(spec, u0_zero, T, grid)
        g_low = gap_lowT(spec, u0_zero, T, grid, kmat)
        s_full = -d_omega_dT_formula(spec, sweep, T).total
        c_full = specific_heat_from_entropy(spec, sweep, T, cv_step)
        g_full = np.asarray(sweep.solve(T).values)
        corr_full = g_full - u0_zero.values
        corr_low = g_low - u0_zero.values
        errors = {
            "entropy": _rel(s_low, s_full),
            "cv": _rel(c_low, c_full),
            "gap": float(np.max(np.abs(g_low - g_full)) / np.max(np.abs(g_full))),
        }
        # error of u(T) - u(0) itself, which the gap metric above dilutes by u(0)
        corr_err = float(np.max(np.abs(corr_low - corr_full))
                         / max(np.max(np.abs(corr_full)), 1e-300))
        reports.append(AsymptoticReport(T, s_low, s_full, c_low, c_full, g_low, g_full, errors,
                                        corr_err))
    return reports


def approximation_residuals(spec: MaterialSpec, sweep, u0_zero: GapSolution, T: float) -> dict:
    """Sizes of the quantities Approximation (A) discards, in natural units.

    ``du2`` is ``sup |d(u^2)/dT| * T / sup(u0)^2``; ``cosh_n`` is
    ``(X/T)^n / cosh(X/T)`` at the gap edge ``X = min sqrt(xi^2 + u0^2)``.
    """
    grid, u = _zero_profile(u0_zero, sweep.grid)
    scale = float(np.max(u)) ** 2
    vp = du2_dT(sweep, T)
    x = float(np.min(np.hypot(grid.nodes, u))) / T
    sech = 2.0 * float(exp_neg(np.array(x))) / (1.0 + float(exp_neg(np.array(2 * x))))
    out = {"du2": float(np.max(np.abs(vp))) * T / scale if scale > 0 else 0.0}
    for n in (0, 1, 2):
        out[f"cosh_{n}"] = x**n * sech
    return out


def measure_t0(spec: MaterialSpec, sweep, u0_zero: GapSolution, threshold: float = 1e-6,
               lo_frac: float = 1e-3, hi_frac: float = 0.5, steps: int = 40) -> float:
    """Largest ``T`` at which every Approximation (A) residual is below ``threshold``.

    Bisection on ``T / u0(0)`` in ``[lo_frac, hi_frac]``; residuals are
    assumed to grow with ``T``. Returns 0.0 if even ``lo_frac`` fails.
    """
    delta = float(np.max(u0_zero.values))
    if delta <= 0:
        return 0.0

    def ok(frac):
        return max(approximation_residuals(spec, sweep, u0_zero, frac * delta).values()) < threshold

    if not ok(lo_frac):
        return 0.0
    if ok(hi_frac):
        return hi_frac * delta
    lo, hi = lo_frac, hi_frac
    for _ in range(steps):
        mid = math.sqrt(lo * hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
        if hi / lo - 1 < 1e-6:
            break
    return lo * delta
