"""Overflow-safe elementary factors used by the band integrands."""

import numpy as np

EXP_CUTOFF = 700.0


def tanh_half(E, T):
    """``tanh(E / 2T)``, with the ``T = 0`` limit equal to 1."""
    E = np.asarray(E, float)
    if T == 0:
        return np.ones_like(E)
    return np.tanh(E / (2.0 * T))


def exp_neg(x):
    """``exp(-x)`` for ``x >= 0``, exactly 0 beyond the cutoff."""
    x = np.asarray(x, float)
    out = np.zeros_like(x)
    ok = x <= EXP_CUTOFF
    out[ok] = np.exp(-x[ok])
    return out


def fermi(E, T):
    """``1 / (exp(E/T) + 1)``; zero at ``T = 0`` for ``E > 0``."""
    E = np.asarray(E, float)
    if T == 0:
        return np.zeros_like(E)
    e = exp_neg(E / T)
    return e / (1.0 + e)


def log1p_exp_neg(E, T):
    """``ln(1 + exp(-E/T))``."""
    E = np.asarray(E, float)
    if T == 0:
        return np.zeros_like(E)
    return np.log1p(exp_neg(E / T))


def sech2_half(E, T):
    """``cosh(E / 2T) ** -2`` written through ``exp(-E/T)``."""
    E = np.asarray(E, float)
    if T == 0:
        return np.zeros_like(E)
    e = exp_neg(E / T)
    return 4.0 * e / (1.0 + e) ** 2


def sech2(y):
    """``cosh(y) ** -2`` for real ``y``."""
    e = exp_neg(2.0 * np.abs(np.asarray(y, float)))
    return 4.0 * e / (1.0 + e) ** 2
