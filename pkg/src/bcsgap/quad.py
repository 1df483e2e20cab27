"""Composite Gauss-Legendre quadrature on the energy band and on the half-line.

Every band integral in the package is a weighted sum over the nodes of an
:class:`EnergyGrid`, so the solver, the thermodynamics and the asymptotic
formulas all see the same discretisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import AccuracyError, EvaluationError, ParameterError

DEFAULT_PANELS = 16
DEFAULT_ORDER = 20


@lru_cache(maxsize=None)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _composite_rule(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gauss_legendre(order)
    a = edges[:-1, None]
    b = edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + half * (x[None, :] + 1.0)).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True, eq=False)
class EnergyGrid:
    """Quadrature nodes and weights on ``[epsilon, omega_cut]``.

    ``edges`` holds the panel boundaries; nodes of panel ``p`` occupy the
    slice ``p*order:(p+1)*order``.
    """

    epsilon: float
    omega_cut: float
    nodes: np.ndarray
    weights: np.ndarray
    edges: np.ndarray
    order: int

    @property
    def panels(self) -> int:
        return len(self.edges) - 1

    @property
    def size(self) -> int:
        return len(self.nodes)

    def integrate(self, values) -> float:
        """Weighted sum of ``values`` sampled at the nodes (no callable)."""
        return float(np.dot(self.weights, values))

    def refined(self, factor: int = 2) -> "EnergyGrid":
        return build_grid(self.epsilon, self.omega_cut, self.panels * factor, self.order)


def build_grid(epsilon: float, omega_cut: float, panels: int = DEFAULT_PANELS,
               order: int = DEFAULT_ORDER) -> EnergyGrid:
    """Composite Gauss-Legendre grid with ``panels`` equal panels of ``order`` nodes."""
    epsilon = float(epsilon)
    omega_cut = float(omega_cut)
    if not (np.isfinite(epsilon) and np.isfinite(omega_cut)):
        raise ParameterError("band edges must be finite")
    if not 0.0 <= epsilon < omega_cut:
        # epsilon = 0 is allowed for generic quadrature; the physics layers require > 0
        raise ParameterError(f"need 0 <= epsilon < omega_cut, got {epsilon} and {omega_cut}")
    if int(panels) < 1:
        raise ParameterError(f"panels must be >= 1, got {panels}")
    if int(order) < 2:
        raise ParameterError(f"order must be >= 2, got {order}")
    panels = int(panels)
    order = int(order)
    edges = np.linspace(epsilon, omega_cut, panels + 1)
    nodes, weights = _composite_rule(edges, order)
    for arr in (nodes, weights, edges):
        arr.setflags(write=False)
    return EnergyGrid(epsilon, omega_cut, nodes, weights, edges, order)


def _checked_values(f: Callable, points: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
        values = np.asarray(f(points), dtype=float)
    if values.shape != points.shape:
        values = np.broadcast_to(values, points.shape)
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        raise EvaluationError(f"integrand is not finite at node {i} (x = {points[i]!r}): {values[i]!r}")
    return values


def integrate(f: Callable, grid: EnergyGrid) -> float:
    """Integrate ``f`` over the grid's band. ``f`` is called once on the node array."""
    return grid.integrate(_checked_values(f, grid.nodes))


def _half_line_edges(level: int) -> np.ndarray:
    # uniform panels on (0, 1); both end panels split geometrically, the
    # right one only down to 1e-9 so that 1 - s stays well resolved
    m = 8 * 2 ** level
    ratio = 0.15
    h = 1.0 / m
    left = h * ratio ** np.arange(12 + 4 * level, 0, -1)
    right_depth = int(np.log(1e-9 / h) / np.log(ratio))
    right = h * ratio ** np.arange(1, right_depth + 1)
    inner = np.linspace(0.0, 1.0, m + 1)[1:-1]
    return np.concatenate(([0.0], left, inner, 1.0 - right, [1.0]))


def integrate_half_line(f: Callable, decay_scale: float = 1.0, rtol: float = 1e-12,
                        order: int = DEFAULT_ORDER, max_level: int = 6) -> float:
    """Integrate ``f`` over ``(0, inf)``.

    Uses ``eta = decay_scale * s / (1 - s)`` and a composite rule on ``(0, 1)``
    graded toward both ends, doubling the panel count until two successive
    estimates agree to ``rtol``.
    """
    if not decay_scale > 0:
        raise ParameterError(f"decay_scale must be > 0, got {decay_scale}")
    c = float(decay_scale)

    def estimate(level: int) -> float:
        s, w = _composite_rule(_half_line_edges(level), order)
        one_minus = 1.0 - s
        eta = c * s / one_minus
        jac = c / one_minus**2
        values = _checked_values(f, eta)
        with np.errstate(over="ignore", invalid="ignore"):
            terms = values * jac
        # f decays faster than the Jacobian grows; 0 * inf only arises at underflow
        terms[values == 0.0] = 0.0
        return math.fsum((w * terms).tolist())

    previous = estimate(0)
    for level in range(1, max_level + 1):
        current = estimate(level)
        if abs(current - previous) <= rtol * max(abs(current), 1e-300) or current == previous:
            return current
        previous = current
    raise AccuracyError(
        f"half-line quadrature did not converge to rtol={rtol}: last two estimates "
        f"{previous!r} and {current!r}"
    )

