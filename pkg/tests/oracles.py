"""Independent reference evaluations used by the tests.

These deliberately avoid the package's vectorised code paths: shrinkage and
its derivative come from sympy, sums are plain Python loops.
"""

import math
from functools import lru_cache

import sympy


@lru_cache(maxsize=None)
def _tau_exprs(beta):
    x, t = sympy.symbols("x t", positive=True)
    alive = x * (1 - t**beta * x ** (-beta))
    return sympy.lambdify((x, t), alive), sympy.lambdify((x, t), sympy.diff(alive, x))


def tau(x, t, beta):
    """Scalar beta-shrinkage of x (beta may be math.inf)."""
    if abs(x) <= t:
        return 0.0
    if math.isinf(beta):
        return x
    h, _ = _tau_exprs(beta)
    return math.copysign(float(h(abs(x), t)), x)


def dtau(x, t, beta):
    """d tau / dx away from the kill zone; 0 inside it."""
    if abs(x) <= t:
        return 0.0
    if math.isinf(beta):
        return 1.0
    _, dh = _tau_exprs(beta)
    # tau is odd, so its derivative is even in x
    return float(dh(abs(x), t))


def sure_termwise(x, thresholds, beta, sigma, diag_wwt, n):
    """-n s^2 + sum (h_i - x_i)^2 + 2 sum s^2 diag_i dh_i, one term at a time."""
    total = -n * sigma**2
    for xi, ti, di in zip(x, thresholds, diag_wwt):
        total += (tau(xi, ti, beta) - xi) ** 2
        total += 2 * sigma**2 * di * dtau(xi, ti, beta)
    return total
