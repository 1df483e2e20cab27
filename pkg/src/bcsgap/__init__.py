"""Numerical BCS gap equation with an arbitrary positive pairing kernel.

Solves the finite-temperature gap equation on a band [epsilon, omega_cut],
locates T_c from the linearised operator, and evaluates the thermodynamic
potential, entropy, specific heat and their low-temperature forms.
"""

from .asymptotics import build_report, measure_t0, universal_constants, universal_ratio
from .errors import (AccuracyError, BCSError, ConfigError, EvaluationError, KernelDomainError,
                     NoTransitionError, NumericalError, ParameterError, PositivityError,
                     StepSizeError)
from .gap_solver import GapSolution, GapSweep, solve_gap, solve_gap_zero_T, sweep_gap
from .potential import ConstantKernel, SeparableKernel, TabulatedKernel, validate_kernel
from .quad import EnergyGrid, build_grid, integrate, integrate_half_line
from .tc_finder import TcResult, find_tc, linearized_radius
from .thermo import MaterialSpec, entropy, omega, specific_heat

__version__ = "0.1.0"
