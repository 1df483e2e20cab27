import json

import numpy as np
import pytest

from bcsgap import ConstantKernel, SeparableKernel, build_grid, find_tc, linearized_radius, solve_gap
from bcsgap.errors import BracketingError, NoTransitionError, NumericalError, ParameterError
from bcsgap.tc_finder import linearized_operator, power_iteration

from . import frozen, oracles

GRID = build_grid(1e-3, 1.0)
CONST = ConstantKernel(0.3)
SEP = SeparableKernel((0.5, 0.125))


@pytest.mark.parametrize("T", [0.01, 0.04, 0.2])
def test_constant_radius_closed_form(T):
    ref = oracles.radius_rank_one(oracles.const_g(0.3), T, 1e-3, 1.0)
    assert abs(linearized_radius(CONST, GRID, T) - ref) < 1e-10


@pytest.mark.parametrize("T", [0.01, 0.034, 0.2])
def test_separable_radius_closed_form(T):
    ref = oracles.radius_rank_one(oracles.sep_g, T, 1e-3, 1.0)
    assert abs(linearized_radius(SEP, GRID, T) - ref) < 1e-10


def test_radius_requires_positive_temperature():
    with pytest.raises(ParameterError):
        linearized_radius(CONST, GRID, 0.0)


@pytest.mark.parametrize("kernel", [CONST, SEP], ids=["constant", "separable"])
def test_radius_decreasing_on_ladder(kernel):
    radii = [linearized_radius(kernel, GRID, T) for T in np.geomspace(0.005, 0.2, 10)]
    assert all(b < a for a, b in zip(radii, radii[1:]))


def test_constant_tc_oracle():
    res = find_tc(CONST, GRID)
    assert abs(res.tc / frozen.TC_CONST_03 - 1) < 1e-10
    assert abs(res.tc - 1.134 * np.exp(-1 / 0.3)) < 0.002
    assert abs(res.spectral_radius_at_tc - 1) <= 1e-10
    lo, hi = res.bracket
    assert lo < res.tc < hi
    assert res.power_iterations > 0


def test_separable_tc_oracle():
    assert abs(find_tc(SEP, GRID).tc / frozen.TC_SEP - 1) < 1e-10


def test_stronger_kernel_raises_tc():
    assert find_tc(ConstantKernel(0.33), GRID).tc > find_tc(CONST, GRID).tc
    assert find_tc(SeparableKernel((0.55, 0.1375)), GRID).tc > find_tc(SEP, GRID).tc


def test_solutions_either_side_of_tc():
    tc = find_tc(CONST, GRID).tc
    assert solve_gap(CONST, GRID, 1.01 * tc).trivial
    below = solve_gap(CONST, GRID, 0.99 * tc)
    assert below.converged and not below.trivial


def test_perron_vector_positive():
    A = linearized_operator(SEP, GRID, 0.03)
    r, v, _ = power_iteration(A)
    assert np.all(v > 0)
    assert np.max(np.abs(A @ v - r * v)) < 1e-10


def test_power_iteration_matches_eigvals():
    rng = np.random.default_rng(3)
    A = rng.uniform(0.1, 1.0, (12, 12))
    r, _, _ = power_iteration(A)
    assert r == pytest.approx(max(abs(np.linalg.eigvals(A))), rel=1e-11)


def test_power_iteration_stagnation():
    A = np.array([[0.0, 2.0], [1.0, 0.0]])   # eigenvalues +-sqrt(2): no dominant one
    with pytest.raises(NumericalError):
        power_iteration(A, max_iter=500)


def test_weak_kernel_has_no_transition():
    with pytest.raises(NoTransitionError):
        find_tc(ConstantKernel(0.01), GRID)


def test_huge_kernel_cannot_be_bracketed():
    with pytest.raises(BracketingError):
        find_tc(ConstantKernel(1e5), GRID)


def test_result_serialises():
    d = find_tc(CONST, GRID).to_dict()
    assert set(d) == {"tc", "spectral_radius_at_tc", "bracket", "power_iterations"}
    json.dumps(d)
