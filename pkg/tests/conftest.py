import numpy as np
import pytest

from l1lab import quadratic_problem


@pytest.fixture
def scalar_quad():
    """1-D problem f(x) = x^2 / 2 with lam = 1 and unit step constant."""
    return quadratic_problem([[1.0]], [0.0], lam=1.0, lipschitz=1.0)


@pytest.fixture
def shifted_scalar_quad():
    """1-D problem f(x) = (x - 4)^2 / 2 with lam = 1 and unit step constant."""
    return quadratic_problem([[1.0]], [-4.0], lam=1.0, lipschitz=1.0)


def grid_refine_minimum(F, lo, hi, levels=3, points=2001):
    """Brute-force minimizer of a 1-D function by nested grid refinement."""
    for _ in range(levels):
        xs = np.linspace(lo, hi, points)
        vals = np.array([F(x) for x in xs])
        i = int(np.argmin(vals))
        span = (hi - lo) / (points - 1)
        lo, hi = xs[i] - span, xs[i] + span
    return 0.5 * (lo + hi)
