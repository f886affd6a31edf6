"""Special-function helpers: log-gamma ratios, compensated sums and 2F1."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gamma, gammaln, rgamma

from .exceptions import ConvergenceError

MAX_TERMS = 100_000
# Above this argument the direct Gauss series gets slow; use the z -> 1 - z connection.
_CONNECTION_SWITCH = 0.75


def log_gamma_ratio(num, den):
    """log(prod Gamma(num_i) / prod Gamma(den_i)) as a sum of log-gamma differences."""
    return float(sum(math.lgamma(x) for x in num) - sum(math.lgamma(x) for x in den))


def kahan_sum(values) -> float:
    """Compensated sum (Neumaier's variant, which also handles large cancelling terms)."""
    total = 0.0
    comp = 0.0
    for v in values:
        v = float(v)
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    return total + comp


def _series(a: float, b: float, c: float, z: float) -> float:
    total = 1.0
    comp = 0.0
    term = 1.0
    small = 0
    for k in range(MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(term) <= 1e-17 * abs(total):
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
        if term == 0.0:
            return total
    raise ConvergenceError(
        f"2F1({a}, {b}; {c}; {z}) series did not converge in {MAX_TERMS} terms")


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real 0 <= z < 1.

    The Gauss series is summed with Kahan compensation.  For z close to 1 the
    standard connection formula to argument 1 - z is used, which requires
    c - a - b to be non-integer.
    """
    if not 0.0 <= z < 1.0:
        raise ValueError(f"z must lie in [0, 1), got {z}")
    if z <= _CONNECTION_SWITCH:
        return _series(a, b, c, z)
    s = c - a - b
    if float(s).is_integer():
        return _series(a, b, c, z)
    w = 1.0 - z
    regular, singular = hyp2f1_connection(a, b, c, w)
    return regular + w ** s * singular


def hyp2f1_connection(a: float, b: float, c: float, w: float) -> tuple[float, float]:
    """Split 2F1(a, b; c; 1 - w) = regular + w^(c-a-b) * singular for small w >= 0.

    Passing w directly avoids the cancellation in forming 1 - z near z = 1.
    """
    s = c - a - b
    if float(s).is_integer():
        raise ValueError("connection formula needs non-integer c - a - b")
    first = gamma(c) * gamma(s) * rgamma(c - a) * rgamma(c - b)
    second = gamma(c) * gamma(-s) * rgamma(a) * rgamma(b)
    regular = first * _series(a, b, 1.0 - s, w) if first != 0.0 else 0.0
    singular = second * _series(c - a, c - b, 1.0 + s, w) if second != 0.0 else 0.0
    return float(regular), float(singular)


def hyp2f1_limit_coefficient(a: float, b: float, c: float) -> float:
    """Gamma(c)Gamma(a+b-c)/(Gamma(a)Gamma(b)), the weight of (1-z)^(c-a-b) as z -> 1."""
    return float(gamma(c) * gamma(a + b - c) * rgamma(a) * rgamma(b))


def log_binomial(n, k):
    """Elementwise log C(n, k) via gammaln (vectorised)."""
    n = np.asarray(n, dtype=float)
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)
