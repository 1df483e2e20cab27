"""Transition temperature from the spectral radius of the linearised gap operator.

Linearising the gap equation at u = 0 gives the positive operator

    (A_T f)(x) = int U(x, xi) tanh(xi / 2T) / xi f(xi) dxi,

whose spectral radius decreases in T. T_c is where it crosses 1.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ._special import tanh_half
from .errors import BracketingError, NoTransitionError, NumericalError, ParameterError
from .gap_solver import kernel_matrix
from .potential import PotentialKernel
from .quad import EnergyGrid

RADIUS_RTOL = 1e-12
MAX_POWER_ITER = 100_000


@dataclass(frozen=True)
class TcResult:
    tc: float
    spectral_radius_at_tc: float
    bracket: tuple
    power_iterations: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bracket"] = list(self.bracket)
        return d


def linearized_operator(kernel: PotentialKernel, grid: EnergyGrid, T: float, kmat=None) -> np.ndarray:
    if kmat is None:
        kmat = kernel_matrix(kernel, grid)
    xi = grid.nodes
    return kmat * (tanh_half(xi, T) / xi)[None, :]


def power_iteration(A: np.ndarray, rtol: float = RADIUS_RTOL, max_iter: int = MAX_POWER_ITER):
    """Dominant eigenvalue and eigenvector of an entrywise positive matrix.

    Returns ``(radius, vector, iterations)``; the vector is normalised to unit
    sup-norm and is strictly positive for a positive matrix.
    """
    v = np.ones(A.shape[0])
    lam = 0.0
    for it in range(1, max_iter + 1):
        w = A @ v
        new = float(np.max(np.abs(w)))
        if new == 0.0:
            return 0.0, v, it
        w /= new
        if abs(new - lam) <= rtol * new and np.max(np.abs(w - v)) <= 1e3 * rtol:
            return new, w, it
        lam, v = new, w
    raise NumericalError(f"power iteration stagnated after {max_iter} steps (last estimate {lam})")


def linearized_radius(kernel: PotentialKernel, grid: EnergyGrid, T: float, kmat=None,
                      return_details: bool = False):
    """Spectral radius of the discretised linearised operator at ``T > 0``."""
    if not T > 0:
        raise ParameterError(f"temperature must be > 0, got {T}")
    radius, vec, its = power_iteration(linearized_operator(kernel, grid, float(T), kmat))
    if return_details:
        return radius, vec, its
    return radius


def find_tc(kernel: PotentialKernel, grid: EnergyGrid, tol: float = 1e-10,
            t_rtol: float = 1e-10) -> TcResult:
    """Bisect ``radius(T) - 1`` after bracketing by doubling/halving from ``T = epsilon``."""
    if tol <= 0:
        raise ParameterError(f"tol must be > 0, got {tol}")
    kmat = kernel_matrix(kernel, grid)
    total_its = 0

    def excess(T):
        nonlocal total_its
        r, _, its = linearized_radius(kernel, grid, T, kmat, return_details=True)
        total_its += its
        return r - 1.0

    eps = grid.epsilon if grid.epsilon > 0 else grid.nodes[0]
    t_floor, t_ceiling = eps / 100.0, 1e3 * grid.omega_cut
    T = eps
    f = excess(T)
    if f > 0:
        lo, f_lo = T, f
        while True:
            T *= 2.0
            if T > t_ceiling:
                raise BracketingError(f"spectral radius still above 1 at T = {t_ceiling}")
            f = excess(T)
            if f <= 0:
                hi, f_hi = T, f
                break
            lo, f_lo = T, f
    else:
        hi, f_hi = T, f
        while True:
            T /= 2.0
            if T < t_floor:
                raise NoTransitionError(
                    f"spectral radius below 1 even at T = {t_floor:g}; kernel too weak")
            f = excess(T)
            if f > 0:
                lo, f_lo = T, f
                break
            hi, f_hi = T, f
    bracket = (lo, hi)

    mid, f_mid = lo, f_lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = excess(mid)
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
        if abs(f_mid) <= tol and (hi - lo) <= t_rtol * mid:
            break
    else:
        raise NumericalError(f"bisection for T_c did not settle (|radius-1| = {abs(f_mid):.2e})")
    return TcResult(mid, f_mid + 1.0, bracket, total_its)
