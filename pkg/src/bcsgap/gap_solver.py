"""Fixed-point solution of the gap equation on a quadrature grid.

The discretised equation reads

    u_i = sum_j w_j U(xi_i, xi_j) u_j / E_j * tanh(E_j / 2T),   E_j = sqrt(xi_j**2 + u_j**2)

and is solved by damped Picard iteration. Zero is always a fixed point; a
positive initial profile picks up the nontrivial branch below T_c.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ._special import fermi, tanh_half
from .errors import ParameterError, StepSizeError
from .potential import PotentialKernel
from .quad import EnergyGrid

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000
TRIVIAL_FLOOR = 1e-13
MIN_DAMPING = 1.0 / 64


@dataclass(frozen=True, eq=False)
class GapSolution:
    temperature: float
    values: np.ndarray
    residual_sup: float
    iterations: int
    converged: bool
    trivial: bool = False
    damping: float = 1.0
    grid: EnergyGrid | None = None
    correction: np.ndarray | None = None

    @property
    def sup(self) -> float:
        """Sup-norm of the profile."""
        return float(np.max(np.abs(self.values))) if len(self.values) else 0.0


def kernel_matrix(kernel: PotentialKernel, grid: EnergyGrid) -> np.ndarray:
    """``K[i, j] = w_j U(xi_i, xi_j)``."""
    return np.asarray(kernel.matrix(grid.nodes, grid.nodes), float) * grid.weights[None, :]


def row_integrals(kernel: PotentialKernel, grid: EnergyGrid, kmat=None) -> np.ndarray:
    if kmat is None:
        kmat = kernel_matrix(kernel, grid)
    return kmat.sum(axis=1)


def _rhs(kmat, xi, T, u):
    E = np.hypot(xi, u)
    return kmat @ (u / E * tanh_half(E, T))


def gap_rhs(kernel: PotentialKernel, grid: EnergyGrid, T: float, u, kmat=None) -> np.ndarray:
    """Right-hand side of the discretised gap equation at temperature ``T``."""
    if T < 0:
        raise ParameterError(f"temperature must be >= 0, got {T}")
    u = np.asarray(u, float)
    if kmat is None:
        kmat = kernel_matrix(kernel, grid)
    return _rhs(kmat, grid.nodes, float(T), u)


def evaluate_profile(kernel: PotentialKernel, sol: GapSolution, x) -> np.ndarray:
    """Nystrom extension of a solution to arbitrary points of the band.

    Applies the right-hand side of the gap equation at ``x``; at the grid
    nodes this reproduces ``sol.values`` up to the residual.
    """
    if sol.grid is None:
        raise ParameterError("solution carries no grid")
    grid = sol.grid
    x = np.atleast_1d(np.asarray(x, float))
    u = np.asarray(sol.values, float)
    E = np.hypot(grid.nodes, u)
    kx = np.asarray(kernel.matrix(x, grid.nodes), float) * grid.weights[None, :]
    return kx @ (u / E * tanh_half(E, sol.temperature))


def _check_common(T, tol, damping):
    T = float(T)
    if T < 0:
        raise ParameterError(f"temperature must be >= 0, got {T}")
    if tol <= 0:
        raise ParameterError(f"tol must be > 0, got {tol}")
    if not 0 < damping <= 1:
        raise ParameterError(f"damping must be in (0, 1], got {damping}")
    return T


def _collapsed(u, res, ratio, d):
    return 0 <= ratio < 1 and float(np.max(np.abs(u))) <= 2.0 * res * d / (1.0 - ratio)


def _picard(residual, x, lower, tol, max_iter, damping, T, floor=None, collapsed=None):
    """Damped iteration ``x <- max(x + d r(x), lower)``.

    ``floor(x)`` optionally supplies a machine-precision stopping level; the
    run then ends when the residual reaches it, stops decreasing for 20
    steps, or ``collapsed(x, res, ratio, d)`` reports a profile
    indistinguishable from zero. It counts as converged when the residual is
    within ``tol``.
    """
    d = float(damping)
    prev_res = np.inf
    best = np.inf
    stale = 0
    ratio = np.nan
    increases = 0
    it = 0
    while True:
        r = residual(x)
        res = float(np.max(np.abs(r)))
        if np.isfinite(prev_res) and prev_res > 0:
            ratio = res / prev_res
        if floor is None:
            if res <= tol:
                return x, res, it, True, ratio, d
        else:
            if res < best:
                best, stale = res, 0
            else:
                stale += 1
            if res <= floor(x) or (res <= tol and (
                    stale >= 20 or (collapsed is not None and collapsed(x, res, ratio, d)))):
                return x, res, it, res <= tol, ratio, d
        if it >= max_iter:
            return x, res, it, res <= tol, ratio, d
        if res > prev_res:
            increases += 1
            if increases >= 5 and d > MIN_DAMPING:
                d = max(d / 2, MIN_DAMPING)
                increases = 0
                log.debug("T=%g: residual rising, damping halved to %g", T, d)
        else:
            increases = 0
        prev_res = res
        x = np.maximum(x + d * r, lower)
        it += 1


def _finish(T, u, res, it, converged, ratio, d, grid, correction=None):
    sup = float(np.max(np.abs(u)))
    trivial = sup < TRIVIAL_FLOOR
    if converged and not trivial:
        trivial = _collapsed(u, res, ratio, d)
    if trivial:
        u = np.zeros_like(u)
        res = 0.0
        converged = True
        correction = None
    if not converged:
        log.warning("gap iteration at T=%g stopped after %d steps, residual %.3e", T, it, res)
    u.setflags(write=False)
    if correction is not None:
        correction.setflags(write=False)
    return GapSolution(T, u, res, it, converged, trivial, d, grid, correction)


def solve_gap(kernel: PotentialKernel, grid: EnergyGrid, T: float, init=None,
              tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
              damping: float = 1.0, kmat=None, polish: bool = False) -> GapSolution:
    """Damped Picard iteration ``u <- (1 - d) u + d F(u)``.

    Stops when ``sup |F(u) - u| <= tol``; with ``polish=True`` it keeps going
    to the rounding floor (``converged`` still refers to ``tol``). If the residual grows for five
    consecutive steps the damping is halved, down to 1/64.

    The returned profile is labelled trivial (and set to exactly zero) when
    it collapses below 1e-13, or when zero lies inside twice the a-posteriori
    error bound ``residual * d / (1 - q)``, ``q`` being the observed
    contraction ratio. In the linear regime just above T_c the bound equals
    the profile's own size, hence the factor 2.
    """
    T = _check_common(T, tol, damping)
    if kmat is None:
        kmat = kernel_matrix(kernel, grid)
    xi = grid.nodes
    u = row_integrals(kernel, grid, kmat) if init is None else np.array(init, dtype=float)
    if u.shape != xi.shape:
        raise ParameterError(f"init has shape {u.shape}, grid has {xi.shape}")
    if np.any(u < 0) or not np.all(np.isfinite(u)):
        raise ParameterError("init must be finite and nonnegative")

    floor = None
    if polish:
        def floor(v):
            return 8.0 * np.finfo(float).eps * float(np.max(np.abs(v)))
    u, res, it, converged, ratio, d = _picard(
        lambda v: _rhs(kmat, xi, T, v) - v, u, 0.0, tol, max_iter, damping, T, floor,
        lambda v, res_, q_, d_: _collapsed(v, res_, q_, d_))
    return _finish(T, u, res, it, converged, ratio, d, grid)


def solve_gap_correction(kernel: PotentialKernel, grid: EnergyGrid, T: float,
                         reference: GapSolution, init=None, tol: float = DEFAULT_TOL,
                         max_iter: int = DEFAULT_MAX_ITER, damping: float = 1.0,
                         kmat=None) -> GapSolution:
    """Solve for ``w = u(T) - u_ref`` relative to a zero-temperature solution.

    With ``phi(u) = u / E`` and ``tanh = 1 - 2 f`` the residual becomes

        K [phi(u_ref + w) - phi(u_ref)] - 2 K [phi(u_ref + w) f] + r_ref - w,

    where ``r_ref = F_0(u_ref) - u_ref`` and the difference of ``phi`` is
    evaluated in a cancellation-free algebraic form. ``w`` is therefore
    resolved to full relative precision even when it is exponentially small,
    which is what temperature derivatives at low ``T`` need. Iteration runs to
    the machine-precision floor; ``converged`` means the residual is within
    ``tol``.
    """
    T = _check_common(T, tol, damping)
    if reference.temperature != 0 or reference.trivial:
        raise ParameterError("the reference must be a nontrivial solution at T = 0")
    if kmat is None:
        kmat = kernel_matrix(kernel, grid)
    xi = grid.nodes
    u0 = np.asarray(reference.values, float)
    E0 = np.hypot(xi, u0)
    phi0 = u0 / E0
    r0 = kmat @ phi0 - u0
    xi2 = xi * xi

    def residual(w):
        u = u0 + w
        E = np.hypot(xi, u)
        dphi = xi2 * w * (u0 + u) / (E * E0 * (u * E0 + u0 * E))
        f = fermi(E, T)
        return kmat @ (dphi - 2.0 * (u / E) * f) + r0 - w

    def floor(w):
        return 4.0 * np.finfo(float).eps * (float(np.max(np.abs(w))) + float(np.max(np.abs(r0))))

    w = np.zeros_like(u0) if init is None else np.array(init, dtype=float) - u0
    w = np.maximum(w, -u0)
    w, res, it, converged, ratio, d = _picard(
        residual, w, -u0, tol, max_iter, damping, T, floor,
        lambda w_, res_, q_, d_: _collapsed(u0 + w_, res_, q_, d_))
    return _finish(T, u0 + w, res, it, converged, ratio, d, grid, correction=w)


def solve_gap_zero_T(kernel: PotentialKernel, grid: EnergyGrid, tol: float = DEFAULT_TOL,
                     max_iter: int = DEFAULT_MAX_ITER, init=None, kmat=None) -> GapSolution:
    return solve_gap(kernel, grid, 0.0, init=init, tol=tol, max_iter=max_iter, kmat=kmat)


class GapSweep:
    """Gap solutions over temperature with warm-start continuation.

    Solutions requested at temperatures not yet solved are computed on demand,
    warm-started from the nearest nontrivial solution at a lower temperature.
    With ``precise=True`` (the default) every ``T > 0`` is solved in
    correction form relative to the ``T = 0`` solution, so differences between
    temperatures are free of solver noise.
    """

    def __init__(self, kernel: PotentialKernel, grid: EnergyGrid, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER, damping: float = 1.0, precise: bool = True):
        self.kernel = kernel
        self.grid = grid
        self.tol = tol
        self.max_iter = max_iter
        self.damping = damping
        self.precise = precise
        self.kmat = kernel_matrix(kernel, grid)
        self._solutions: dict[float, GapSolution] = {}
        self.requested: list[float] = []

    @property
    def temperatures(self) -> list[float]:
        return sorted(self._solutions)

    @property
    def solutions(self) -> list[GapSolution]:
        return [self._solutions[t] for t in self.temperatures]

    def __contains__(self, T) -> bool:
        return float(T) in self._solutions

    def _warm_start(self, T: float):
        below = [t for t in self._solutions if t <= T and not self._solutions[t].trivial]
        if below:
            return self._solutions[max(below)].values
        return None

    def solve(self, T: float, init=None) -> GapSolution:
        T = float(T)
        if T in self._solutions:
            return self._solutions[T]
        if init is None:
            init = self._warm_start(T)
        opts = dict(tol=self.tol, max_iter=self.max_iter, damping=self.damping, kmat=self.kmat)
        ref = self.zero_T() if self.precise and T > 0 else None
        if ref is not None and not ref.trivial:
            sol = solve_gap_correction(self.kernel, self.grid, T, ref, init=init, **opts)
        else:
            sol = solve_gap(self.kernel, self.grid, T, init=init, **opts)
        self._solutions[T] = sol
        return sol

    __call__ = solve

    def zero_T(self) -> GapSolution:
        if 0.0 not in self._solutions:
            self._solutions[0.0] = solve_gap(self.kernel, self.grid, 0.0, tol=self.tol,
                                             max_iter=self.max_iter, damping=self.damping,
                                             kmat=self.kmat, polish=self.precise)
        return self._solutions[0.0]


class NormalState:
    """Stand-in for :class:`GapSweep` whose every solution is ``u = 0``."""

    kernel = None
    tol = 0.0

    def __init__(self, grid: EnergyGrid):
        self.grid = grid

    def solve(self, T: float, init=None) -> GapSolution:
        u = np.zeros(self.grid.size)
        u.setflags(write=False)
        return GapSolution(float(T), u, 0.0, 0, True, True, 1.0, self.grid)

    __call__ = solve


def sweep_gap(kernel: PotentialKernel, grid: EnergyGrid, temperatures,
              tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
              damping: float = 1.0, precise: bool = True) -> GapSweep:
    """Solve at each temperature in increasing order, warm-starting each step."""
    temps = [float(t) for t in temperatures]
    if any(t < 0 for t in temps):
        raise ParameterError("temperatures must be >= 0")
    if any(b <= a for a, b in zip(temps, temps[1:])):
        raise ParameterError("temperatures must be strictly increasing")
    sweep = GapSweep(kernel, grid, tol=tol, max_iter=max_iter, damping=damping, precise=precise)
    sweep.requested = temps
    for t in temps:
        sol = sweep.solve(t)
        if not sol.converged:
            log.warning("sweep: no convergence at T=%g (residual %.3e)", t, sol.residual_sup)
    return sweep


def default_step(T: float, sol: GapSolution | None = None) -> float:
    """Finite-difference step for temperature derivatives of the gap.

    ``max(1e-4, 0.01 T)``, capped at ``0.25 T``; when the profile at ``T``
    is supplied the step is further limited to ``0.05 T**2 / E_min`` so that
    ``exp(-E_min / T)`` stays well resolved at low temperature.
    """
    h = min(max(1e-4, 0.01 * T), 0.25 * T)
    if sol is not None and sol.grid is not None and T > 0:
        e_min = float(np.min(np.hypot(sol.grid.nodes, sol.values)))
        h = min(h, 0.05 * T * T / e_min)
    return h


def du2_dT(sweep: GapSweep, T: float, h: float | None = None) -> np.ndarray:
    """Temperature derivative of ``u(T, xi)**2`` at the nodes.

    Central differences at steps ``h`` and ``h/2`` combined by one Richardson
    step. When the differences are buried in solver noise a
    :class:`StepSizeError` is raised, unless ``h`` is already at least the
    default step, in which case the (noise-level) estimate is returned.
    """
    T = float(T)
    h_default = default_step(T, sweep.solve(T))
    h = h_default if h is None else float(h)
    if h <= 0:
        raise ParameterError(f"h must be > 0, got {h}")
    if T - h < 0:
        raise ParameterError(f"T - h = {T - h} < 0; use a smaller step")

    def central(step):
        up = sweep.solve(T + step)
        down = sweep.solve(T - step)
        if up.correction is not None and down.correction is not None:
            # same reference: u+^2 - u-^2 = (w+ - w-)(u+ + u-)
            return (up.correction - down.correction) * (up.values + down.values)
        return up.values**2 - down.values**2

    diff_h = central(h)
    diff_h2 = central(h / 2)
    sols = [sweep.solve(t) for t in (T - h, T + h)]
    scale = max(s.sup for s in sols)
    level = max([s.residual_sup for s in sols] + [np.finfo(float).eps * scale])
    noise = 10.0 * 2.0 * scale * level
    if np.max(np.abs(diff_h)) < noise and h < h_default:
        raise StepSizeError(
            f"u^2 differences at T={T} with h={h} are below the solver noise {noise:.2e}; "
            f"use h >= {h_default:g}")
    d1 = diff_h / (2 * h)
    d2 = diff_h2 / h
    return (4.0 * d2 - d1) / 3.0
