"""Schoenberg sequences: synthesis, analysis, dimension conversion and moments."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import gammaln

from . import gegenbauer as gb
from .exceptions import DimensionError, DivergenceError, DomainError, ParityError, QuadratureError
from .model import IsotropicFunction
from .quadrature import composite_rule

INF = math.inf
TOL_COEFF = 1e-10
TOL_NORMALIZED = 1e-8
DEFAULT_N = 128

Dimension = Union[int, float]


def _check_dimension(d) -> Dimension:
    if d == INF or d == "inf":
        return INF
    if int(d) != d or d < 1:
        raise DimensionError(f"dimension must be a positive integer or inf, got {d!r}")
    return int(d)


@dataclass(frozen=True, eq=False)
class SchoenbergSequence:
    """Truncated coefficients (b_0, ..., b_N) of psi in dimension d (or inf).

    Use :meth:`from_values` to apply the clamping rule for roundoff negatives.
    ``truncated`` marks a finite section of an infinite sequence (as produced by
    projection or series constructors); moment sums are only checked for
    convergence on truncated sequences.
    """

    dimension: Dimension
    coefficients: np.ndarray
    tail_mass: float = 0.0
    normalized: bool = True
    truncated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "dimension", _check_dimension(self.dimension))
        coeffs = np.array(self.coefficients, dtype=float).ravel()
        if coeffs.size == 0:
            raise DomainError("a Schoenberg sequence needs at least one coefficient")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "tail_mass", float(self.tail_mass))

    @classmethod
    def from_values(cls, dimension, values, tail_mass: Optional[float] = None,
                    normalized: bool = True, truncated: bool = False) -> "SchoenbergSequence":
        """Build a sequence, clamping values in (-1e-10, 0) to zero.

        Any value at or below -1e-10 marks the sequence as outside the class and
        clears the ``normalized`` flag.
        """
        b = np.array(values, dtype=float).ravel()
        small = (b < 0) & (b > -TOL_COEFF)
        b[small] = 0.0
        if np.any(b <= -TOL_COEFF):
            normalized = False
        if tail_mass is None:
            tail_mass = max(0.0, 1.0 - math.fsum(b))
        return cls(dimension, b, tail_mass, normalized, truncated)

    @classmethod
    def unit(cls, dimension, index: int, length: Optional[int] = None) -> "SchoenbergSequence":
        b = np.zeros(max(index + 1, length or 0))
        b[index] = 1.0
        return cls(dimension, b)

    @property
    def N(self) -> int:
        return self.coefficients.size - 1

    @property
    def is_class(self) -> bool:
        return bool(np.all(self.coefficients > -TOL_COEFF))

    @property
    def total(self) -> float:
        return math.fsum(self.coefficients)

    def normalization_ok(self) -> bool:
        return abs(self.total + self.tail_mass - 1.0) <= TOL_NORMALIZED

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, self.coefficients.size))
        out[: self.coefficients.size] = self.coefficients
        return out

    def to_dict(self) -> dict:
        return {
            "dimension": "inf" if self.dimension == INF else int(self.dimension),
            "coefficients": [float(x) for x in self.coefficients],
            "tail_mass": float(self.tail_mass),
            "truncated": bool(self.truncated),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SchoenbergSequence":
        tail = data.get("tail_mass")
        return cls.from_values(data["dimension"], data["coefficients"], tail_mass=tail,
                               truncated=bool(data.get("truncated", False)))

    @classmethod
    def from_json(cls, text: str) -> "SchoenbergSequence":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        head = ", ".join(f"{x:.6g}" for x in self.coefficients[:6])
        more = ", ..." if self.coefficients.size > 6 else ""
        return (f"SchoenbergSequence(dimension={self.dimension}, N={self.N}, "
                f"coefficients=[{head}{more}], tail_mass={self.tail_mass:.3g})")


def lam_of(d: Dimension) -> float:
    return 0.5 * (d - 1)


# -- synthesis ---------------------------------------------------------------

def _basis(d: Dimension, nmax: int, theta: np.ndarray) -> np.ndarray:
    if d == INF:
        x = np.cos(theta)
        out = np.empty((nmax + 1,) + x.shape)
        out[0] = 1.0
        for n in range(1, nmax + 1):
            out[n] = out[n - 1] * x
        return out
    return gb.normalized_table(lam_of(d), nmax, np.cos(theta))


def synthesize(seq: SchoenbergSequence, theta, dimension: Optional[Dimension] = None):
    """psi(theta) = sum_n b_n C_n(cos theta) / C_n(1), or sum_n b_n cos(theta)^n for d = inf.

    ``dimension`` overrides the sequence's own tag (used for shifted sequences).
    """
    d = seq.dimension if dimension is None else _check_dimension(dimension)
    th = np.asarray(theta, dtype=float)
    b = seq.coefficients
    if d == INF:
        x = np.cos(th)
        acc = np.zeros_like(x)
        for coef in b[::-1]:
            acc = acc * x + coef
        out = acc
    else:
        out = np.tensordot(b, _basis(d, b.size - 1, th), axes=1)
    return float(out) if th.ndim == 0 else out


def synthesize_derivative(seq: SchoenbergSequence, theta,
                          dimension: Optional[Dimension] = None):
    """d/dtheta of :func:`synthesize`."""
    d = seq.dimension if dimension is None else _check_dimension(dimension)
    th = np.asarray(theta, dtype=float)
    b = seq.coefficients
    if b.size == 1:
        out = np.zeros_like(th)
    elif d == INF:
        x = np.cos(th)
        acc = np.zeros_like(x)
        for n in range(b.size - 1, 0, -1):
            acc = acc * x + n * b[n]
        out = -np.sin(th) * acc
    else:
        table = gb.normalized_theta_derivative_table(lam_of(d), b.size - 1, th)
        out = np.tensordot(b, table, axes=1)
    return float(out) if th.ndim == 0 else out


def function_from_sequence(seq: SchoenbergSequence, label: Optional[str] = None) -> IsotropicFunction:
    """Wrap a finite sequence as an IsotropicFunction with analytic derivative."""
    try:
        second = second_derivative_at_zero_from_sequence(seq)
    except DivergenceError:
        second = None
    return IsotropicFunction(
        evaluator=lambda t: synthesize(seq, t),
        derivative_evaluator=lambda t: synthesize_derivative(seq, t),
        second_derivative_at_zero=second,
        label=label or f"synthesized(d={seq.dimension}, N={seq.N})",
    )


# -- analysis ----------------------------------------------------------------

def _node_count(N: int, d: int) -> int:
    return 64 * math.ceil((N + d) / 32)


def _project(psi: IsotropicFunction, d: int, N: int, m: int):
    lam = lam_of(d)
    x, w = composite_rule(0.0, math.pi, m, psi.kinks)
    weight = w * np.sin(x) ** (d - 1) if d > 1 else w
    vals = np.asarray(psi(x), dtype=float)
    table = gb.normalized_table(lam, N, np.cos(x))
    log_h = np.array([gb.log_norm_squared(lam, n) for n in range(N + 1)])
    coeffs = (table @ (weight * vals)) / np.exp(log_h)
    constant = math.fsum(weight) / math.exp(log_h[0])
    return coeffs, constant


def analyze(psi: IsotropicFunction, d: int, N: int = DEFAULT_N,
            strict: bool = True) -> SchoenbergSequence:
    """d-Schoenberg coefficients (b_0, ..., b_N) of psi by Gauss-Legendre projection.

    The projection is computed with m and 2m nodes per smooth piece of psi; if
    they disagree by more than 1e-9 (relative to the coefficient scale), or the
    constant function does not project to 1 within 1e-8, QuadratureError is raised.
    """
    d = _check_dimension(d)
    if d == INF:
        raise DimensionError("no general inversion to an infinity-Schoenberg sequence; "
                             "use a family constructor such as multiquadric_sequence")
    if int(N) != N or N < 0:
        raise DomainError("N must be a nonnegative integer")
    m = _node_count(N, d)
    coarse, _ = _project(psi, d, N, m)
    fine, constant = _project(psi, d, N, 2 * m)
    if abs(constant - 1.0) > 1e-8:
        raise QuadratureError(f"constant function projects to {constant!r}, not 1")
    scale = max(1.0, float(np.max(np.abs(fine))))
    gap = float(np.max(np.abs(fine - coarse)))
    if strict and gap > 1e-9 * scale:
        raise QuadratureError(f"projection unstable under node doubling (gap {gap:.3g})")
    return SchoenbergSequence.from_values(d, fine, truncated=True)


# -- conversion kernels ------------------------------------------------------

def _log_kappa(d, j, n):
    j = np.asarray(j, dtype=float)
    n = np.asarray(n, dtype=float)
    return (gammaln(d - 1.0) - 2.0 * gammaln(0.5 * (d - 1.0))
            + gammaln(0.5 * (d - 1.0 + j - n)) + gammaln(0.5 * (d - 1.0 + j + n))
            + gammaln(j + 1.0) - gammaln(0.5 * (j - n + 2.0)) - gammaln(0.5 * (j + n + 2.0))
            - gammaln(d - 1.0 + j))


def _log_tau(j, n):
    j = np.asarray(j, dtype=float)
    n = np.asarray(n, dtype=float)
    return (-j * math.log(2.0) + gammaln(j + 1.0)
            - gammaln(0.5 * (j - n + 2.0)) - gammaln(0.5 * (j + n + 2.0)))


def kernel_value(kind: str, j: int, n: int, d: Optional[int] = None) -> float:
    """kappa_d(j, n) (kind='kappa', needs d >= 2) or tau(j, n) (kind='tau')."""
    if not (0 <= n <= j):
        raise DomainError(f"need 0 <= n <= j, got j={j}, n={n}")
    if (j - n) % 2:
        raise ParityError(f"j - n must be even, got j={j}, n={n}")
    if kind == "tau":
        return float(np.exp(_log_tau(j, n)))
    if kind == "kappa":
        if d is None or d < 2:
            raise DimensionError("kappa kernel needs d >= 2")
        return float(np.exp(_log_kappa(d, j, n)))
    raise DomainError(f"unknown kernel kind {kind!r}")


def conversion_matrix(d: Dimension, size: int) -> np.ndarray:
    """Matrix K with b_1 = K b_d for sequences of the given length."""
    j = np.arange(size)[None, :]
    m = np.arange(size)[:, None]
    valid = (j >= m) & ((j - m) % 2 == 0)
    jj = np.where(valid, j, 0)
    mm = np.where(valid, m, 0)
    logk = _log_tau(jj, mm) if d == INF else _log_kappa(d, jj, mm)
    weight = np.where(m == 0, 1.0, 2.0)
    return np.where(valid, weight * np.exp(logk), 0.0)


def to_one_dim(seq: SchoenbergSequence) -> SchoenbergSequence:
    """1-Schoenberg sequence from a d-Schoenberg (d >= 2) or infinity-Schoenberg sequence.

    Only even-indexed input reaches even-indexed output and odd reaches odd.
    """
    if seq.dimension == 1:
        return seq
    K = conversion_matrix(seq.dimension, seq.coefficients.size)
    return SchoenbergSequence.from_values(1, K @ seq.coefficients, tail_mass=seq.tail_mass,
                                          normalized=seq.normalized, truncated=seq.truncated)


# -- moments and derivatives at zero -----------------------------------------

@dataclass(frozen=True)
class MomentSum:
    value: float
    converged: bool
    tail_increment: float


def moment_sum(seq: SchoenbergSequence, power: int) -> MomentSum:
    """sum_n b_n n^power with a truncation-level convergence diagnostic.

    For a truncated sequence the sum is flagged as not converged when the
    contribution of the last tenth of the indices exceeds 1e-6 times the total.
    Exact finite sequences always converge.
    """
    b = seq.coefficients
    n = np.arange(b.size, dtype=float)
    terms = b * n ** power
    total = math.fsum(terms)
    start = b.size - max(1, math.ceil(b.size / 10))
    tail = math.fsum(terms[start:]) if start > 0 else 0.0
    converged = (not seq.truncated) or abs(tail) <= 1e-6 * abs(total) or total == 0.0
    return MomentSum(total, converged, tail)


def _require_moment(seq, power):
    ms = moment_sum(seq, power)
    if not ms.converged:
        raise DivergenceError(
            f"moment of order {power} not converged at N={seq.N} "
            f"(last-decade increment {ms.tail_increment:.3g} of {ms.value:.3g})")


def second_derivative_at_zero_from_sequence(seq: SchoenbergSequence) -> float:
    """psi''(0) = -sum_n b_n n (n + d - 1) / d, or -sum_n n b_n for d = inf."""
    d = seq.dimension
    b = seq.coefficients
    n = np.arange(b.size, dtype=float)
    if d == INF:
        _require_moment(seq, 1)
        return -math.fsum(b * n)
    _require_moment(seq, 2)
    return -math.fsum(b * n * (n + d - 1.0) / d)


def fourth_derivative_at_zero_from_sequence(seq: SchoenbergSequence) -> float:
    """psi''''(0) from the sequence (finite d or inf)."""
    d = seq.dimension
    b = seq.coefficients
    n = np.arange(b.size, dtype=float)
    if d == INF:
        _require_moment(seq, 2)
        return math.fsum(b * n * (3.0 * n - 2.0))
    _require_moment(seq, 4)
    return math.fsum(b * n * (n + d - 1.0) / d * (1.0 + 3.0 * (n - 1.0) * (n + d) / (d + 2.0)))


# first positive zeros of J_{-1/2} and J_{1/2}
_BESSEL_FIRST_ZERO = {1: math.pi / 2.0, 3: math.pi}


def corner_bound(d: int, c: float) -> float:
    """Upper bound (4 / d) (j_{(d-2)/2} / c)^2 on inf(-psi''(0)) over psi supported in [0, c]."""
    if d not in _BESSEL_FIRST_ZERO:
        raise DimensionError("corner bound available for d in {1, 3} only")
    if not 0 < c <= math.pi:
        raise DomainError("c must lie in (0, pi]")
    return 4.0 / d * (_BESSEL_FIRST_ZERO[d] / c) ** 2


# -- family sequences ---------------------------------------------------------

def multiquadric_sequence(tau: float, delta: float, dimension: Dimension = INF,
                          N: Optional[int] = None, cutoff: float = 1e-18) -> SchoenbergSequence:
    """Closed-form Schoenberg sequence of the multiquadric.

    Available for d = inf (binomial series in cos theta), d = 1 with tau = 1
    (Poisson kernel), and finite d with tau = (d - 1) / 2 (generating function).
    Without N, the sequence is cut once coefficients drop below ``cutoff``.
    """
    if not tau > 0 or not 0 < delta < 1:
        raise DomainError("need tau > 0 and delta in (0, 1)")
    d = _check_dimension(dimension)
    nmax = N if N is not None else 200_000
    n = np.arange(nmax + 1, dtype=float)
    if d == INF:
        a = 2.0 * delta / (1.0 + delta * delta)
        logb = (2.0 * tau * math.log1p(-delta) - tau * math.log1p(delta * delta)
                + gammaln(tau + n) - gammaln(tau) - gammaln(n + 1.0) + n * math.log(a))
    elif d == 1:
        if tau != 1:
            raise DomainError("closed form in d = 1 only for tau = 1")
        logb = math.log((1.0 - delta) / (1.0 + delta)) + n * math.log(delta) + np.where(
            n > 0, math.log(2.0), 0.0)
    else:
        lam = lam_of(d)
        if tau != lam:
            raise DomainError(f"closed form in d = {d} only for tau = {lam:g}")
        logb = ((d - 1.0) * math.log1p(-delta) + n * math.log(delta)
                + gammaln(n + 2.0 * lam) - gammaln(n + 1.0) - gammaln(2.0 * lam))
    b = np.exp(logb)
    if N is None:
        peak = int(np.argmax(b))
        small = np.nonzero((b < cutoff) & (n > peak))[0]
        b = b[: small[0] + 1] if small.size else b
    tail = max(0.0, 1.0 - math.fsum(b))
    return SchoenbergSequence(d, b, tail, True, truncated=True)
