"""Moment sums of the conversion kernels and their large-j behaviour.

kappa_d(j, n) and tau(j, n) convert d- and infinity-Schoenberg coefficients to
1-Schoenberg coefficients.  The weighted sums

    2 sum_{n=1}^j (2n)^l kappa_d(2j, 2n)          (even parity)
    2 sum_{n=1}^j (2n-1)^l kappa_d(2j-1, 2n-1)    (odd parity)

grow like c_d(l) j^l; the tau analogues have exact closed forms for l <= 4.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.special import bernoulli, gammaln

from .exceptions import DomainError

PARITIES = ("even", "odd")
EXACT_J_MAX = 30


def _check_parity(parity: str) -> None:
    if parity not in PARITIES:
        raise DomainError(f"parity must be 'even' or 'odd', got {parity!r}")


def _indices(j: int, parity: str):
    """Top index m and the sequence of lower indices (2n or 2n-1, n = 1..j)."""
    _check_parity(parity)
    if j < 1:
        raise DomainError("j must be positive")
    n = np.arange(1, j + 1, dtype=float)
    if parity == "even":
        return 2 * j, 2.0 * n
    return 2 * j - 1, 2.0 * n - 1.0


# -- kappa kernel ---------------------------------------------------------------

_ASYMPTOTIC_X = 20.0
# [B_{n+1}(1/2) - B_{n+1}(0)] / (n (n + 1)) with alternating sign, n = 1..12
_HALF_COEFFS = [(-1) ** (n + 1) * (2.0 ** -n - 2.0) * float(bernoulli(n + 1)[-1]) / (n * (n + 1))
                for n in range(1, 13)]


def half_ratio(x):
    """Gamma(x + 1/2) / Gamma(x) to full relative precision for x > 0.

    Small x uses math.gamma directly; large x the Stirling-type expansion of the
    log-gamma difference, which avoids the cancellation in lgamma(x+1/2) - lgamma(x).
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < _ASYMPTOTIC_X
    if small.any():
        out[small] = [math.gamma(v + 0.5) / math.gamma(v) for v in x[small]]
    big = ~small
    if big.any():
        xb = x[big]
        inv = 1.0 / xb
        series = np.zeros_like(xb)
        for c in reversed(_HALF_COEFFS):
            series = (series + c) * inv
        out[big] = np.sqrt(xb) * np.exp(series)
    return out


def rising(x, s: float):
    """Gamma(x + s) / Gamma(x) for integer or half-integer s >= -1/2."""
    x = np.asarray(x, dtype=float)
    if s == -0.5:
        return 1.0 / half_ratio(x - 0.5)
    whole = int(math.floor(s))
    out = np.ones_like(x)
    if s != whole:
        out = half_ratio(x)
        x = x + 0.5
    for i in range(whole):
        out = out * (x + i)
    return out


def kappa(d: int, j, n):
    """kappa_d(j, n) as ratios of Gamma functions with offsets (d-3)/2 and d-2.

    Evaluating these ratios directly keeps full relative accuracy at large j,
    where differences of log-gamma values lose about log10(j) digits.
    """
    if d < 2:
        raise DomainError("kappa needs d >= 2")
    j = np.asarray(j, dtype=float)
    n = np.asarray(n, dtype=float)
    s = 0.5 * (d - 3.0)
    const = math.exp(math.lgamma(d - 1.0) - 2.0 * math.lgamma(0.5 * (d - 1.0)))
    return (const * rising(0.5 * (j - n + 2.0), s) * rising(0.5 * (j + n + 2.0), s)
            / rising(j + 1.0, d - 2))


def kappa_recursive(d: int, j, n):
    """kappa_{d+2}(j, n) from kappa_d(j, n) by the two-step dimension recursion."""
    j = np.asarray(j, dtype=float)
    n = np.asarray(n, dtype=float)
    factor = (d / (d - 1.0)) * ((d - 1.0 + j) / (d + j) - n * n / ((d - 1.0 + j) * (d + j)))
    return factor * kappa(d, j, n)


def kappa_moment_sum(d: int, l: int, j: int, parity: str = "even") -> float:
    m, lower = _indices(j, parity)
    terms = lower ** l * kappa(d, m, lower)
    return 2.0 * math.fsum(terms)


def c_d_constant(d: int, l: int) -> float:
    """Limit constant c_d(l) of kappa_moment_sum / j^l.

    Bases c_2(l) = 2^l Gamma((l+1)/2) / (sqrt(pi) Gamma(l/2 + 1)) and
    c_3(l) = 2^l / (l + 1); c_{d+2}(l) = d/(d-1) (c_d(l) - c_d(l+2)/4).
    """
    if int(d) != d or d < 2:
        raise DomainError("d must be an integer >= 2")
    if l < 0:
        raise DomainError("l must be nonnegative")
    if d == 2:
        return 2.0 ** l * math.exp(math.lgamma(0.5 * (l + 1)) - math.lgamma(0.5 * l + 1)) / math.sqrt(math.pi)
    if d == 3:
        return 2.0 ** l / (l + 1.0)
    e = d - 2
    return e / (e - 1.0) * (c_d_constant(e, l) - 0.25 * c_d_constant(e, l + 2))


# -- tau kernel -----------------------------------------------------------------

def _log_tau_weights(j: int, parity: str) -> np.ndarray:
    """log tau(m, 2n) or log tau(m, 2n-1) for n = 1..j, m the top index.

    Built from the central value 2^-2j C(2j, j) = prod (1 - 1/(2i)) and ratios of
    neighbouring binomials, so each log carries only O(n eps) absolute error.
    """
    central = float(np.sum(np.log1p(-0.5 / np.arange(1, j + 1))))
    i = np.arange(1, j, dtype=float)
    if parity == "even":
        # tau(2j, 2n) = 2^-2j C(2j, j + n); ratios (j - i + 1) / (j + i)
        ratios = np.log((j - np.arange(1, j + 1) + 1.0) / (j + np.arange(1, j + 1.0)))
        logs = central + np.cumsum(ratios)
    else:
        # tau(2j-1, 2n-1) = 2^-(2j-1) C(2j-1, j+n-1); tau(2j-1, 1) equals the central value
        logs = central + np.concatenate([[0.0], np.cumsum(np.log((j - i) / (j + i)))])
    return logs


def tau_sum_float(l: int, j: int, parity: str = "even") -> float:
    _, lower = _indices(j, parity)
    logs = _log_tau_weights(j, parity)
    if l == 0:
        t = logs
    else:
        t = logs + l * np.log(lower)
    top = float(t.max())
    return 2.0 * math.exp(top) * math.fsum(np.exp(t - top))


def tau_sum_exact(l: int, j: int, parity: str = "even") -> Fraction:
    """Exact rational value via big-integer binomials."""
    _check_parity(parity)
    if parity == "even":
        num = sum(math.comb(2 * j, j + n) * (2 * n) ** l for n in range(1, j + 1))
        return Fraction(2 * num, 4 ** j)
    num = sum(math.comb(2 * j - 1, j + n - 1) * (2 * n - 1) ** l for n in range(1, j + 1))
    return Fraction(2 * num, 2 ** (2 * j - 1))


def tau_closed_form(l: int, j: int, parity: str = "even") -> Optional[Fraction]:
    """Closed form of the tau moment sum for l in {0, 2, 4}, in terms of the top index m.

    m = 2j (even) or 2j - 1 (odd): p_2 = m, p_4 = m(3m - 2), p_0 = 1 - 2^-m C(m, m/2)
    for even m and 1 for odd m.  For even parity these read 2j and 4j(3j - 1).
    """
    _check_parity(parity)
    m = 2 * j if parity == "even" else 2 * j - 1
    if l == 0:
        return Fraction(1) - Fraction(math.comb(2 * j, j), 4 ** j) if parity == "even" else Fraction(1)
    if l == 2:
        return Fraction(m)
    if l == 4:
        return Fraction(m * (3 * m - 2))
    return None


def literal_closed_form(l: int, j: int) -> Optional[Fraction]:
    """2j and 4j(3j - 1) as stated for both parities (exact only for the even sums)."""
    return {0: Fraction(1) - Fraction(math.comb(2 * j, j), 4 ** j),
            2: Fraction(2 * j), 4: Fraction(4 * j * (3 * j - 1))}.get(l)


@dataclass
class TauMoment:
    l: int
    j: int
    parity: str
    value: float
    exact: Optional[Fraction]
    closed_form: Optional[Fraction]

    @property
    def exact_match(self) -> Optional[bool]:
        if self.exact is None or self.closed_form is None:
            return None
        return self.exact == self.closed_form

    @property
    def relative_error(self) -> Optional[float]:
        if self.closed_form is None:
            return None
        ref = float(self.closed_form)
        return abs(self.value - ref) / abs(ref)


def tau_moment_sum(l: int, j: int, parity: str = "even") -> TauMoment:
    if l < 0 or l % 2:
        raise DomainError("l must be a nonnegative even integer")
    value = tau_sum_float(l, j, parity)
    exact = tau_sum_exact(l, j, parity) if j <= EXACT_J_MAX else None
    return TauMoment(l, j, parity, value, exact, tau_closed_form(l, j, parity))


# -- conjecture probe -------------------------------------------------------------

def geometric_grid(j_min: int, j_max: int, per_decade: int = 10) -> np.ndarray:
    decades = math.log10(j_max / j_min)
    count = max(2, int(round(decades * per_decade)) + 1)
    grid = np.unique(np.round(np.geomspace(j_min, j_max, count)).astype(int))
    return grid


@dataclass
class AsymptoticProbe:
    k: int
    power: int
    j_grid: list
    even_values: list
    odd_values: list
    even_ratios: list
    odd_ratios: list
    target: Optional[float] = None
    stabilization: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"k": self.k, "power": self.power, "j_grid": self.j_grid,
                "even_values": self.even_values, "odd_values": self.odd_values,
                "even_ratios": self.even_ratios, "odd_ratios": self.odd_ratios,
                "target": self.target, "stabilization": self.stabilization}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["j", "even_value", "even_ratio", "odd_value", "odd_ratio"])
        for row in zip(self.j_grid, self.even_values, self.even_ratios,
                       self.odd_values, self.odd_ratios):
            writer.writerow([row[0]] + [repr(float(v)) for v in row[1:]])
        return buf.getvalue()


def _drift(j_grid, ratios):
    j = np.asarray(j_grid)
    r = np.asarray(ratios)
    start = int(np.searchsorted(j, j[-1] / 10.0))
    start = min(start, len(j) - 2)
    successive = np.abs(np.diff(r)) / np.abs(r[1:])
    return {"decade_start": int(j[start]),
            "last_decade_drift": float(abs(r[-1] - r[start]) / abs(r[-1])),
            "successive_relative_differences": successive.tolist()}


def conjecture_probe(k: int, j_max: int = 10_000, j_min: int = 10,
                     per_decade: int = 10) -> AsymptoticProbe:
    """Ratios S(j) / j^k of the (2n)^(2k) and (2n-1)^(2k) tau moment sums on a
    geometric j-grid.  No limit value is asserted."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if j_max <= j_min:
        raise DomainError("j_max must exceed j_min")
    grid = geometric_grid(j_min, j_max, per_decade)
    ev, od = [], []
    for j in grid:
        ev.append(tau_sum_float(2 * k, int(j), "even"))
        od.append(tau_sum_float(2 * k, int(j), "odd"))
    er = [v / float(j) ** k for v, j in zip(ev, grid)]
    orat = [v / float(j) ** k for v, j in zip(od, grid)]
    de = _drift(grid, er)
    do = _drift(grid, orat)
    stab = {"even": de, "odd": do,
            "last_decade_drift": max(de["last_decade_drift"], do["last_decade_drift"]),
            "even_odd_relative_gap": abs(er[-1] / orat[-1] - 1.0)}
    return AsymptoticProbe(k, k, [int(j) for j in grid], ev, od, er, orat, None, stab)


def log_tau(j, n):
    """log tau(j, n) from log-gamma (used for spot checks against the stable path)."""
    j = np.asarray(j, dtype=float)
    n = np.asarray(n, dtype=float)
    return (-j * math.log(2.0) + gammaln(j + 1.0)
            - gammaln(0.5 * (j - n + 2.0)) - gammaln(0.5 * (j + n + 2.0)))
