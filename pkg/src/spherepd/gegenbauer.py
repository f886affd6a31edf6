"""Gegenbauer (ultraspherical) polynomials C_n^lambda and their normalised ratios.

For lambda > 0 values come from the three-term recurrence in the degree.  The
lambda = 0 case follows the cosine convention C_n^0(cos t) = cos(n t).
Normalised values C_n^lambda(x) / C_n^lambda(1) are propagated directly by a
rescaled recurrence, so they never overflow even when C_n^lambda(1) does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError


@dataclass(frozen=True)
class BasisPoint:
    lam: float
    degree: int
    x: float

    def __post_init__(self):
        _check(self.lam, self.degree, self.x)


def _check(lam, n, x=None):
    if lam < 0 or not np.isfinite(lam):
        raise DomainError(f"lambda must be a finite nonnegative number, got {lam}")
    if int(n) != n or n < 0:
        raise DomainError(f"degree must be a nonnegative integer, got {n}")
    if x is not None:
        xa = np.asarray(x, dtype=float)
        if np.any(np.abs(xa) > 1.0) or np.any(~np.isfinite(xa)):
            raise DomainError("x must lie in [-1, 1]")


def _as_array(x):
    xa = np.asarray(x, dtype=float)
    return xa, xa.ndim == 0


def gegenbauer_value(lam: float, n: int, x):
    """C_n^lambda(x) by forward recurrence (cos(n arccos x) when lambda == 0)."""
    _check(lam, n, x)
    xa, scalar = _as_array(x)
    n = int(n)
    if lam == 0:
        out = np.cos(n * np.arccos(xa))
    elif n == 0:
        out = np.ones_like(xa)
    else:
        prev = np.ones_like(xa)
        cur = 2.0 * lam * xa
        for k in range(1, n):
            prev, cur = cur, (2.0 * (k + lam) * xa * cur - (k + 2.0 * lam - 1.0) * prev) / (k + 1.0)
        out = cur
    return float(out) if scalar else out


def log_gegenbauer_at_one(lam: float, n: int) -> float:
    _check(lam, n)
    if lam == 0 or n == 0:
        return 0.0
    return math.lgamma(n + 2.0 * lam) - math.lgamma(n + 1.0) - math.lgamma(2.0 * lam)


def gegenbauer_at_one(lam: float, n: int) -> float:
    """C_n^lambda(1) = Gamma(n + 2 lambda) / (n! Gamma(2 lambda)); 1 when lambda or n is 0."""
    two_lam = 2.0 * lam
    if two_lam.is_integer() and 0 < two_lam and n + two_lam < 1000:
        # binomial(n + 2 lambda - 1, n), exact in integers
        return float(math.comb(int(n + two_lam) - 1, int(n)))
    return math.exp(log_gegenbauer_at_one(lam, n))


def normalized_table(lam: float, nmax: int, x) -> np.ndarray:
    """Array of shape (nmax + 1, *x.shape) with rows C_n^lambda(x) / C_n^lambda(1)."""
    _check(lam, nmax, x)
    xa = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + xa.shape)
    if lam == 0:
        t = np.arccos(xa)
        for n in range(nmax + 1):
            out[n] = np.cos(n * t)
        return out
    out[0] = 1.0
    if nmax >= 1:
        out[1] = xa
    for n in range(1, nmax):
        out[n + 1] = (2.0 * (n + lam) * xa * out[n] - n * out[n - 1]) / (n + 2.0 * lam)
    return out


def normalized_gegenbauer(lam: float, n: int, x):
    """C_n^lambda(x) / C_n^lambda(1); lies in [-1, 1] and equals 1 at x = 1."""
    _check(lam, n, x)
    xa, scalar = _as_array(x)
    out = normalized_table(lam, int(n), xa)[int(n)]
    return float(out) if scalar else out


def gegenbauer_theta_derivative(lam: float, n: int, theta):
    """d/dtheta C_n^lambda(cos theta) = -sin(theta) 2 lambda C_{n-1}^{lambda+1}(cos theta)."""
    if lam <= 0:
        raise DomainError("lambda must be positive")
    if int(n) != n or n < 1:
        raise DomainError("degree must be a positive integer")
    th, scalar = _as_array(theta)
    out = -np.sin(th) * 2.0 * lam * gegenbauer_value(lam + 1.0, int(n) - 1, np.cos(th))
    return float(out) if scalar else out


def normalized_theta_derivative_table(lam: float, nmax: int, theta) -> np.ndarray:
    """Rows d/dtheta [C_n^lambda(cos theta) / C_n^lambda(1)] for n = 0..nmax.

    Uses C_{n-1}^{lambda+1}(1) 2 lambda / C_n^lambda(1) = n (n + 2 lambda) / (2 lambda + 1),
    which also covers lambda = 0 (derivative of cos(n theta)).
    """
    th = np.asarray(theta, dtype=float)
    out = np.zeros((nmax + 1,) + th.shape)
    if nmax == 0:
        return out
    shifted = normalized_table(lam + 1.0, nmax - 1, np.cos(th))
    n = np.arange(1, nmax + 1, dtype=float).reshape((-1,) + (1,) * th.ndim)
    out[1:] = -np.sin(th) * n * (n + 2.0 * lam) / (2.0 * lam + 1.0) * shifted
    return out


def log_norm_squared(lam: float, n: int) -> float:
    """log of the integral over [0, pi] of (C_n^lambda(cos t) / C_n^lambda(1))^2 sin(t)^(2 lambda)."""
    if lam == 0:
        return math.log(math.pi if n == 0 else math.pi / 2.0)
    raw = (math.log(math.pi) + (1.0 - 2.0 * lam) * math.log(2.0) + math.lgamma(n + 2.0 * lam)
           - math.lgamma(n + 1.0) - math.log(n + lam) - 2.0 * math.lgamma(lam))
    return raw - 2.0 * log_gegenbauer_at_one(lam, n)
