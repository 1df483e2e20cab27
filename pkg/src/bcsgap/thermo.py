"""Thermodynamic potential, entropy and specific heat of the gap solution.

Omega is reported in band units (N0 times energy squared). The entropy is
computed twice: from the analytic seven-term expression for dOmega/dT, with
the temperature derivative of u**2 taken from solved profiles, and by
Richardson-extrapolated central differences of Omega itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._special import fermi, log1p_exp_neg, sech2_half, tanh_half
from .errors import ParameterError, StepSizeError
from .gap_solver import GapSolution, NormalState, du2_dT
from .potential import PotentialKernel, validate_kernel
from .quad import EnergyGrid

ENTROPY_FLOOR = 1e-300


@dataclass(frozen=True)
class MaterialSpec:
    epsilon: float
    omega_cut: float
    n0: float
    kernel: PotentialKernel

    def __post_init__(self):
        if not 0 < self.epsilon < self.omega_cut:
            raise ParameterError(
                f"need 0 < epsilon < omega_cut, got {self.epsilon} and {self.omega_cut}")
        if not self.n0 > 0:
            raise ParameterError(f"n0 must be > 0, got {self.n0}")

    def validate(self, grid: EnergyGrid):
        return validate_kernel(self.kernel, grid)


@dataclass(frozen=True)
class ThermoPoint:
    temperature: float
    omega: float
    entropy_formula: float
    entropy_fd: float
    cv_fd: float = float("nan")
    consistency_gap: float = float("nan")


@dataclass(frozen=True)
class OmegaDerivative:
    """dOmega/dT split into the seven band integrals.

    ``terms[6]`` is the full seventh term; ``term7_leading`` is its part
    without the u**2 derivative and ``term7_du2`` the remainder.
    """

    temperature: float
    terms: tuple
    term7_leading: float
    term7_du2: float
    du2: np.ndarray = field(repr=False)

    @property
    def total(self) -> float:
        return float(sum(self.terms))

    @property
    def du2_weighted(self) -> tuple:
        """Terms 1-4 and the derivative piece of term 7."""
        return (*self.terms[:4], self.term7_du2)


def _band(sol: GapSolution, grid: EnergyGrid | None):
    grid = grid if grid is not None else sol.grid
    if grid is None:
        raise ParameterError("gap solution carries no grid; pass one explicitly")
    return grid, grid.nodes, np.asarray(sol.values, float)


def omega(spec: MaterialSpec, sol: GapSolution, grid: EnergyGrid | None = None) -> float:
    """Thermodynamic potential at ``sol.temperature``."""
    grid, x, u = _band(sol, grid)
    T = sol.temperature
    E = np.hypot(x, u)
    integrand = -2.0 * E + u**2 / E * tanh_half(E, T)
    if T > 0:
        integrand = integrand - 4.0 * T * log1p_exp_neg(E, T)
    return spec.n0 * grid.integrate(integrand)


def omega_normal(spec: MaterialSpec, grid: EnergyGrid, T: float) -> float:
    return omega(spec, NormalState(grid).solve(T))


def d_omega_dT_formula(spec: MaterialSpec, sweep, T: float, h: float | None = None) -> OmegaDerivative:
    """Evaluate the seven-term expression for dOmega/dT at ``T > 0``."""
    T = float(T)
    if not T > 0:
        raise ParameterError(f"temperature must be > 0, got {T}")
    sol = sweep.solve(T)
    grid, x, u = _band(sol, sweep.grid)
    vp = du2_dT(sweep, T, h)
    n0 = spec.n0
    v = u**2
    E = np.hypot(x, u)
    th = tanh_half(E, T)
    s2 = sech2_half(E, T)
    f = fermi(E, T)
    q = grid.integrate
    terms = (
        -n0 * q(vp / E),
        n0 * q(vp / E * th),
        -0.5 * n0 * q(vp * v / E**3 * th),
        n0 / (4.0 * T) * q(vp * v / E**2 * s2),
        -n0 / (2.0 * T**2) * q(v * s2),
        -4.0 * n0 * q(log1p_exp_neg(E, T)),
        -4.0 * n0 * q(f * (E / T - vp / (2.0 * E))),
    )
    lead = -4.0 * n0 * q(f * E / T)
    return OmegaDerivative(T, terms, lead, 4.0 * n0 * q(f * vp / (2.0 * E)), vp)


def _omega_at(spec, sweep, T):
    return omega(spec, sweep.solve(T), sweep.grid)


def entropy_fd(spec: MaterialSpec, sweep, T: float, h: float | None = None) -> float:
    """``-dOmega/dT`` by central differences at ``h`` and ``h/2`` plus one Richardson step."""
    T = float(T)
    h = 0.02 * T if h is None else float(h)
    if not 0 < h < T:
        raise ParameterError(f"need 0 < h < T, got h={h}, T={T}")

    def central(step):
        return (_omega_at(spec, sweep, T + step) - _omega_at(spec, sweep, T - step)) / (2 * step)

    return -(4.0 * central(h / 2) - central(h)) / 3.0


def entropy(spec: MaterialSpec, sweep, T: float, h: float | None = None,
            du2_step: float | None = None) -> ThermoPoint:
    """Entropy by the seven-term formula and by differencing Omega."""
    T = float(T)
    s_formula = -d_omega_dT_formula(spec, sweep, T, du2_step).total
    s_fd = entropy_fd(spec, sweep, T, h)
    gap = abs(s_formula - s_fd) / max(abs(s_fd), ENTROPY_FLOOR)
    return ThermoPoint(T, _omega_at(spec, sweep, T), s_formula, s_fd, float("nan"), gap)


def specific_heat(spec: MaterialSpec, sweep, T: float, h: float | None = None) -> float:
    """``-T d2Omega/dT2`` from second differences at ``h`` and ``h/2`` with Richardson."""
    T = float(T)
    h = 0.05 * T if h is None else float(h)
    if not 0 < h < T:
        raise ParameterError(f"need 0 < h < T, got h={h}, T={T}")
    o0 = _omega_at(spec, sweep, T)

    def second(step):
        num = _omega_at(spec, sweep, T + step) - 2.0 * o0 + _omega_at(spec, sweep, T - step)
        return num, num / step**2

    num, d_h = second(h)
    if abs(num) < 100 * np.finfo(float).eps * abs(o0):
        raise StepSizeError(
            f"second difference of Omega at T={T} with h={h} is lost in rounding ({num:.2e}); "
            "increase h")
    _, d_h2 = second(h / 2)
    return -T * (4.0 * d_h2 - d_h) / 3.0


def specific_heat_from_entropy(spec: MaterialSpec, sweep, T: float, h: float | None = None) -> float:
    """``T dS/dT`` with S from the seven-term formula; Richardson on ``h``, ``h/2``.

    At low temperature this is far less rounding-limited than second
    differences of Omega. The default step keeps ``h * E_min / T**2`` small.
    """
    T = float(T)
    if h is None:
        sol = sweep.solve(T)
        e_min = float(np.min(np.hypot(sweep.grid.nodes, sol.values)))
        h = 0.02 * T * min(1.0, 5.0 * T / e_min)
    if not 0 < h < T:
        raise ParameterError(f"need 0 < h < T, got h={h}, T={T}")

    def s(t):
        return -d_omega_dT_formula(spec, sweep, t).total

    def central(step):
        return (s(T + step) - s(T - step)) / (2 * step)

    return T * (4.0 * central(h / 2) - central(h)) / 3.0


def thermo_point(spec: MaterialSpec, sweep, T: float, h_entropy: float | None = None,
                 h_cv: float | None = None) -> ThermoPoint:
    p = entropy(spec, sweep, T, h_entropy)
    try:
        cv = specific_heat(spec, sweep, T, h_cv)
    except StepSizeError:
        cv = float("nan")
    return ThermoPoint(p.temperature, p.omega, p.entropy_formula, p.entropy_fd, cv,
                       p.consistency_gap)


def thermo_curve(spec: MaterialSpec, sweep, temperatures) -> list[ThermoPoint]:
    return [thermo_point(spec, sweep, T) for T in temperatures]
