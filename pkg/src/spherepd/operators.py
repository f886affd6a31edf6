"""Montee, descente and turning-bands operators on spheres.

Each operator exists at function level (numerical quadrature or differentiation
of psi) and at sequence level (closed-form maps between Schoenberg sequences),
so the two routes can check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import model
from .exceptions import (ConstructionError, DegenerateInputError, DerivativeUnavailableError,
                         DimensionError, DomainError, SpherePDError)
from .model import IsotropicFunction, even_derivative_at_zero, folded, numeric_derivative
from .quadrature import PanelIntegral, integrate, mapped_rule
from .schoenberg import (INF, SchoenbergSequence, analyze, moment_sum, synthesize,
                         synthesize_derivative)
from .special import hyp2f1, hyp2f1_connection
from .validation import differentiability_probe

ADMIT_TOL = 1e-10
NORMALIZER_TOL = 1e-12


class RejectedError(SpherePDError):
    """An operator is not applicable to the given input."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.detail = detail


@dataclass
class OperatorReport:
    operator: str
    admitted: bool
    reason: Optional[str] = None
    normalizer: float = float("nan")
    result_function: Optional[IsotropicFunction] = None
    result_sequence: Optional[SchoenbergSequence] = None
    diagnostics: dict = field(default_factory=dict)

    @classmethod
    def rejected(cls, operator, reason, normalizer=float("nan"), **diagnostics):
        return cls(operator, False, reason, normalizer, diagnostics=diagnostics)

    def to_dict(self) -> dict:
        out = {
            "operator": self.operator,
            "admissibility": "admitted" if self.admitted else f"rejected({self.reason})",
            "normalizer": self.normalizer,
            "diagnostics": dict(self.diagnostics),
        }
        if self.result_sequence is not None:
            out["result_sequence"] = self.result_sequence.to_dict()
        return out


# -- function-level operators ------------------------------------------------

def sine_moment(psi: IsotropicFunction, lower: float = 0.0, upper: float = math.pi) -> float:
    """Integral of sin(beta) psi(beta) over [lower, upper]."""
    return integrate(lambda t: np.sin(t) * psi(t), lower, upper, psi.kinks)


def _endpoint_fix(theta, values, at_zero, at_pi):
    th = np.asarray(theta, dtype=float)
    vals = np.array(values, dtype=float, copy=True).reshape(th.shape)
    if at_zero is not None:
        vals[th == 0.0] = at_zero
    if at_pi is not None:
        vals[th == math.pi] = at_pi
    return vals


def montee_numeric(psi: IsotropicFunction) -> OperatorReport:
    """I_S psi(theta) = int_theta^pi sin(b) psi(b) db / int_0^pi sin(b) psi(b) db."""
    panel = PanelIntegral(lambda t: np.sin(t) * psi(t), 0.0, math.pi, psi.kinks)
    norm = panel.total
    if abs(norm) <= NORMALIZER_TOL:
        return OperatorReport.rejected("montee", "zero-normalizer", norm)
    psi0 = float(psi(0.0))

    def value(t):
        t = np.asarray(t, dtype=float)
        out = panel.tail(t.ravel()) / norm
        return _endpoint_fix(t, out, 1.0, 0.0)

    result = IsotropicFunction(
        evaluator=value,
        derivative_evaluator=lambda t: -np.sin(t) * psi(t) / norm,
        second_derivative_at_zero=-psi0 / norm,
        support_radius=psi.support_radius,
        label=f"montee[{psi.label}]",
        breakpoints=psi.kinks,
    )
    return OperatorReport("montee", True, None, norm, result_function=result,
                          diagnostics={"normalizer": norm})


def _second_at_zero(psi: IsotropicFunction) -> float:
    if psi.second_derivative_at_zero is not None:
        return float(psi.second_derivative_at_zero)
    return even_derivative_at_zero(psi, 2)


def _first_derivative(psi: IsotropicFunction):
    if psi.derivative_evaluator is not None:
        return psi.derivative_evaluator
    ext = folded(psi.evaluator)
    h = 1e-5

    def deriv(t):
        t = np.asarray(t, dtype=float)
        return (ext(t + h) - ext(t - h)) / (2.0 * h)

    return deriv


def descente_numeric(psi: IsotropicFunction) -> OperatorReport:
    """D_S psi(theta) = psi'(theta) / (sin(theta) psi''(0)), extended by limits to [0, pi]."""
    second = _second_at_zero(psi)
    if abs(second) < NORMALIZER_TOL:
        return OperatorReport.rejected("descente", "flat-at-zero", second)
    deriv = _first_derivative(psi)
    analytic = psi.derivative_evaluator is not None

    def ratio(t):
        return deriv(t) / (np.sin(t) * second)

    eps = 1e-3
    # psi'/sin is even about pi; two-point Richardson removes the O(eps^2) term
    at_pi = float((4.0 * ratio(np.array([math.pi - eps]))[0]
                   - ratio(np.array([math.pi - 2 * eps]))[0]) / 3.0)
    boundary_slope = float(deriv(np.array([math.pi]))[0]) if analytic else 0.0
    small = 1e-2
    curvature = None if analytic else (float(ratio(np.array([small]))[0]) - 1.0) / small ** 2

    def value(t):
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        out = np.empty_like(flat)
        inner = (flat > 0.0) & (flat < math.pi)
        out[inner] = ratio(flat[inner])
        if curvature is not None:
            near = inner & (flat < small)
            out[near] = 1.0 + curvature * flat[near] ** 2
        out[flat <= 0.0] = 1.0
        out[flat >= math.pi] = at_pi
        return out.reshape(t.shape)

    result = IsotropicFunction(
        evaluator=value,
        support_radius=psi.support_radius,
        label=f"descente[{psi.label}]",
        breakpoints=psi.kinks,
    )
    return OperatorReport("descente", True, None, second, result_function=result,
                          diagnostics={"psi_second_derivative_at_zero": second,
                                       "psi_derivative_at_pi": boundary_slope})


# -- sequence-level operators ------------------------------------------------

def montee_sequence(seq: SchoenbergSequence) -> OperatorReport:
    """Schoenberg sequence of I_S psi in dimension d - 2 (d >= 3) or inf."""
    d = seq.dimension
    b = seq.coefficients
    n = np.arange(b.size, dtype=float)
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    if d == INF:
        cond = math.fsum(b * sign / (n + 1.0))
        g1 = 2.0 * math.fsum(b[::2] / (n[::2] + 1.0))
        diag = {"condition": cond, "G1": g1}
        if cond < -ADMIT_TOL:
            return OperatorReport.rejected("montee", "negative-c", g1, **diag)
        a = np.empty(b.size + 1)
        a[0] = cond / g1
        a[1:] = b / ((n + 1.0) * g1)
        out_dim = INF
    else:
        if d < 3:
            raise DimensionError("montee on sequences needs d >= 3")
        w = (d - 2.0) / ((n + 1.0) * (n + d - 2.0))
        cond = math.fsum(b * sign * w)
        g1 = 2.0 * math.fsum((b * w)[::2])
        diag = {"c(d)": cond, "G1": g1}
        if cond < -ADMIT_TOL:
            return OperatorReport.rejected("montee", "negative-c", g1, **diag)
        a = np.empty(b.size + 1)
        a[0] = cond / g1
        # a_n = (d - 2) b_{n-1} / (n (n + d - 3) G1), n >= 1
        a[1:] = b * w / g1
        out_dim = d - 2
    result = SchoenbergSequence.from_values(out_dim, a, truncated=seq.truncated)
    return OperatorReport("montee", True, None, g1, result_sequence=result, diagnostics=diag)


def descente_sequence(seq: SchoenbergSequence) -> OperatorReport:
    """Schoenberg sequence of D_S psi in dimension d + 2 (or inf)."""
    d = seq.dimension
    b = seq.coefficients
    if b.size < 2 or not np.any(b[1:] != 0.0):
        raise DegenerateInputError("descente is undefined for psi identically constant")
    n = np.arange(b.size - 1, dtype=float)
    if d == INF:
        weights = b[1:] * (n + 1.0)
        moment = moment_sum(seq, 1)
    else:
        weights = b[1:] * (n + 1.0) * (n + d)
        moment = moment_sum(seq, 2)
    g2 = math.fsum(weights)
    diag = {"G2": g2, "moment_converged": moment.converged}
    if not moment.converged:
        return OperatorReport.rejected("descente", "divergent-G2", g2, **diag)
    result = SchoenbergSequence.from_values(d if d == INF else d + 2, weights / g2,
                                          truncated=seq.truncated)
    return OperatorReport("descente", True, None, g2, result_sequence=result, diagnostics=diag)


# -- montee condition ----------------------------------------------------------

def f_d(d: int, theta: float) -> tuple[float, float]:
    """Weight function f_d of the montee condition in its finite-sum and 2F1 forms."""
    if int(d) != d or d < 3:
        raise DimensionError("f_d needs an integer d >= 3")
    s, c = math.sin(theta), math.cos(theta)
    if d % 2:
        acc = sum(s ** (2 * l) * math.gamma(l) ** 2 * 2.0 ** (2 * l - 2)
                  / (math.pi * math.gamma(2 * l)) for l in range(1, (d - 3) // 2 + 1))
        finite = theta * s / math.pi - c * acc
    else:
        acc = sum(s ** (2 * l - 1) * math.gamma(l - 0.5) ** 2 * 2.0 ** (2 * l - 3)
                  / (math.pi * math.gamma(2 * l - 1)) for l in range(1, d // 2))
        finite = 0.5 * s - c * acc
    return finite, _f_d_hypergeometric(d, theta)


def _f_d_hypergeometric(d: int, theta: float) -> float:
    a, b, cc = 1.0, 0.5 * (d - 1), 0.5 * d
    K = 2.0 ** (d - 3) * math.gamma(0.5 * (d - 1)) ** 2 / (math.pi * math.gamma(d - 1))
    s, c = math.sin(theta), math.cos(theta)
    z = s * s
    if z <= 0.75:
        indicator = s if theta > 0.5 * math.pi else 0.0
        return indicator + K * c * s ** (d - 1) * hyp2f1(a, b, cc, z)
    w = c * c
    regular, singular = hyp2f1_connection(a, b, cc, w)
    # (1 - z)^(c - a - b) = |cos theta|^(-1), so cos * w^(-1/2) is the sign of cos
    if abs(c) < 1e-15:
        left = K * singular
        right = 1.0 - K * singular
        return 0.5 * (left + right) * s ** (d - 1)
    indicator = s if theta > 0.5 * math.pi else 0.0
    return indicator + K * s ** (d - 1) * (c * regular + math.copysign(1.0, c) * singular)


def f_d_integral(psi: IsotropicFunction, d: int) -> float:
    """int_0^pi f_d(theta) psi(theta) dtheta using the finite-sum form."""
    fd = np.vectorize(lambda t: f_d(d, float(t))[0])
    return integrate(lambda t: fd(t) * psi(t), 0.0, math.pi, (*psi.kinks, 0.5 * math.pi))


def montee_condition(obj, d, N: int = 128) -> dict:
    """All available forms of the montee admissibility condition for psi or its sequence.

    Keys: 'series' (c(d) or its inf analogue), 'integral' (int f_d psi),
    'upper_half_integral' (inf case), 'psi_nonnegative' and 'signs_agree'.
    """
    out: dict = {"dimension": "inf" if d == INF else int(d)}
    if isinstance(obj, SchoenbergSequence):
        seq = obj
        psi = IsotropicFunction(evaluator=lambda t: synthesize(seq, t, d), label="synthesized")
    else:
        psi = obj
        seq = None if d == INF else analyze(psi, d, N)
    if seq is not None:
        b = seq.coefficients
        n = np.arange(b.size, dtype=float)
        sign = np.where(n % 2 == 0, 1.0, -1.0)
        if d == INF:
            out["series"] = math.fsum(b * sign / (n + 1.0))
        else:
            out["series"] = math.fsum(b * sign * (d - 2.0) / ((n + 1.0) * (n + d - 2.0)))
    if d == INF:
        out["upper_half_integral"] = sine_moment(psi, 0.5 * math.pi, math.pi)
    else:
        out["integral"] = f_d_integral(psi, d)
    grid = np.linspace(0.0, math.pi, 2001)
    out["psi_nonnegative"] = bool(np.all(np.asarray(psi(grid)) >= 0.0))
    values = [v for k, v in out.items() if k in ("series", "integral", "upper_half_integral")]
    signs = {v >= -ADMIT_TOL for v in values}
    out["signs_agree"] = len(signs) <= 1
    out["admissible"] = all(v >= -ADMIT_TOL for v in values)
    return out


# -- derivatives of the montee -------------------------------------------------

def _derivative_of(psi: IsotropicFunction, m: int, theta: float) -> float:
    if m == 0:
        return float(psi(theta))
    if m == 1 and psi.derivative_evaluator is not None:
        return float(psi.derivative_evaluator(np.asarray(theta, dtype=float)))
    try:
        return numeric_derivative(psi, m, theta)
    except (DomainError, SpherePDError) as exc:
        raise DerivativeUnavailableError(f"derivative of order {m} at {theta}: {exc}") from exc


def montee_derivative(psi: IsotropicFunction, j: int, theta: float,
                      normalizer: Optional[float] = None) -> float:
    """(I_S psi)^(j)(theta) from the derivatives of psi up to order j - 1."""
    if j < 1:
        raise DomainError("j must be positive")
    norm = sine_moment(psi) if normalizer is None else normalizer
    if abs(norm) <= NORMALIZER_TOL:
        raise RejectedError("zero-normalizer")
    derivs = [_derivative_of(psi, m, theta) for m in range(j)]
    sin_part = cos_part = 0.0
    for l in range(j):
        term = math.comb(j - 1, l) * (-1) ** (l // 2) * derivs[j - 1 - l]
        if l % 2 == 0:
            sin_part += term
        else:
            cos_part += term
    return -(math.sin(theta) * sin_part + math.cos(theta) * cos_part) / norm


def _even_derivative(psi: IsotropicFunction, order: int) -> float:
    if order == 0:
        return float(psi(0.0))
    if order == 2 and psi.second_derivative_at_zero is not None:
        return float(psi.second_derivative_at_zero)
    if order > 4:
        raise DerivativeUnavailableError(f"even derivative of order {order} at zero")
    return even_derivative_at_zero(psi, order)


def montee_deriv_at_zero(psi: IsotropicFunction, k: int,
                         normalizer: Optional[float] = None) -> float:
    """(I_S psi)^(2k+2)(0) = -(1/N) sum_l (-1)^l C(2k+1, 2l+1) psi^(2k-2l)(0)."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    norm = sine_moment(psi) if normalizer is None else normalizer
    if abs(norm) <= NORMALIZER_TOL:
        raise RejectedError("zero-normalizer", "int sin(b) psi(b) db vanishes")
    total = math.fsum((-1) ** l * math.comb(2 * k + 1, 2 * l + 1) * _even_derivative(psi, 2 * k - 2 * l)
                      for l in range(k + 1))
    return -total / norm


# -- shift and turning bands ---------------------------------------------------

def shift(seq: SchoenbergSequence, k: int) -> SchoenbergSequence:
    """(b o tau_k)_n = b_{n-k}, zero-padded in front for k > 0, truncated for k < 0."""
    b = seq.coefficients
    if k > 0:
        out = np.concatenate([np.zeros(k), b])
    elif k < 0:
        out = b[-k:] if -k < b.size else np.zeros(1)
    else:
        out = b.copy()
    return SchoenbergSequence(seq.dimension, out, seq.tail_mass, normalized=False,
                              truncated=seq.truncated)


def _finite_dim(seq, dimension):
    d = seq.dimension if dimension is None else dimension
    if d == INF or int(d) != d or d < 1:
        raise DimensionError("turning bands needs a finite dimension d >= 1")
    return int(d)


def turning_bands_down(seq: SchoenbergSequence, theta, dimension: Optional[int] = None):
    """beta_0 + cos(t) psi_{d+2}(b o tau_-1, t) + sin(t) psi'_{d+2}(b o tau_-1, t) / d."""
    d = _finite_dim(seq, dimension)
    up = shift(seq, -1)
    th = np.asarray(theta, dtype=float)
    value = (seq.coefficients[0] + np.cos(th) * synthesize(up, th, d + 2)
             + np.sin(th) * synthesize_derivative(up, th, d + 2) / d)
    return float(value) if th.ndim == 0 else value


def turning_bands_up(seq: SchoenbergSequence, theta, dimension: Optional[int] = None):
    """psi_{d+2}(b o tau_-1, t) = d sin(t)^-d int_0^t sin(r)^(d-1) (psi_d(b, r) - b_0) dr.

    For t > pi/2 the complementary integral over [t, pi] is used (the full
    integral vanishes); t = 0 and t = pi are limits.
    """
    d = _finite_dim(seq, dimension)
    b0 = float(seq.coefficients[0])
    npts = 2 * (seq.N + d) + 32

    def integrand(r):
        return np.sin(r) ** (d - 1) * (synthesize(seq, r, d) - b0)

    def single(t):
        if t <= 0.0:
            return float(synthesize(seq, 0.0, d)) - b0
        if t >= math.pi:
            return b0 - float(synthesize(seq, math.pi, d))
        if t <= 0.5 * math.pi:
            x, w = mapped_rule(0.0, t, npts)
            integral = float(np.dot(w, integrand(x)))
        else:
            x, w = mapped_rule(t, math.pi, npts)
            integral = -float(np.dot(w, integrand(x)))
        return d * integral / math.sin(t) ** d

    th = np.asarray(theta, dtype=float)
    out = np.array([single(float(t)) for t in th.ravel()]).reshape(th.shape)
    return float(out) if th.ndim == 0 else out


# -- optimality witness --------------------------------------------------------

def hat_coefficient(c: float, n: int) -> float:
    """n-th 1-Schoenberg coefficient of (1 - theta / c)_+."""
    if n == 0:
        return c / (2.0 * math.pi)
    return 2.0 * (1.0 - math.cos(n * c)) / (math.pi * c * n * n)


def lift_by_turning_bands(f, m: int, b0: float, kinks=()) -> callable:
    """Function theta -> psi_{m+2}(b o tau_-1, theta) from psi_m = f via the integral identity."""
    panel = PanelIntegral(lambda r: np.sin(r) ** (m - 1) * (f(r) - b0), 0.0, math.pi, kinks)
    f0 = float(f(np.array([0.0]))[0])
    fpi = float(f(np.array([math.pi]))[0])

    def g(t):
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        out = np.empty_like(flat)
        lo = (flat > 0.0) & (flat <= 0.5 * math.pi)
        hi = (flat > 0.5 * math.pi) & (flat < math.pi)
        if lo.any():
            out[lo] = m * panel.head(flat[lo]) / np.sin(flat[lo]) ** m
        if hi.any():
            out[hi] = -m * panel.tail(flat[hi]) / np.sin(flat[hi]) ** m
        out[flat <= 0.0] = f0 - b0
        out[flat >= math.pi] = b0 - fpi
        return out.reshape(t.shape)

    return g


def iterated_montee(psi: IsotropicFunction, k: int) -> IsotropicFunction:
    """(I_S)^k psi by nested panel quadrature (no interpolation between levels)."""
    out = psi
    for _ in range(k):
        report = montee_numeric(out)
        if not report.admitted:
            raise RejectedError(report.reason or "rejected")
        out = report.result_function
    return out


@dataclass
class WitnessResult:
    function: IsotropicFunction
    d: int
    k: int
    c: float
    lifted_dimension: int
    expected_jump_order: int
    constant: float
    probe: object
    second_difference_at_zero: list = field(default_factory=list)
    predicted_second_derivative: Optional[float] = None

    @property
    def jump_detected_at_expected_order(self) -> bool:
        return self.probe.first_failing_order == self.expected_jump_order

    def jump_report(self) -> dict:
        rows = [{"order": o.order, "left": o.left[-1], "right": o.right[-1],
                 "gap": o.gaps[-1], "noise_floor": o.noise_floor, "passed": o.passed}
                for o in self.probe.orders]
        return {"d": self.d, "k": self.k, "c": self.c, "lifted_dimension": self.lifted_dimension,
                "expected_jump_order": self.expected_jump_order,
                "first_failing_order": self.probe.first_failing_order,
                "constant_C": self.constant, "orders": rows,
                "second_difference_at_zero": self.second_difference_at_zero,
                "predicted_second_derivative_at_zero": self.predicted_second_derivative}


def optimality_witness(d: int, k: int, c: float) -> WitnessResult:
    """Member of Psi_d, 2k times differentiable at zero, whose derivative of order
    1 + (d'-1)/2 + k (d' = d + 2k) jumps at theta = c.

    Starts from the hat (1 - theta/c)_+ in Psi_1, lifts it (d'-1)/2 times with the
    turning-bands integral identity, shifts it nonnegative by the smallest constant C
    found on a 4097-point grid, normalises, and applies the montee k times.
    """
    if int(d) != d or d < 1 or d % 2 == 0:
        raise DomainError("d must be an odd positive integer")
    if k < 0:
        raise DomainError("k must be nonnegative")
    if not 0 < c < math.pi:
        raise DomainError("c must lie in (0, pi)")
    dprime = d + 2 * k
    hat = model.make_truncated_linear(c)
    f = hat.evaluator
    for step, m in enumerate(range(1, dprime, 2)):
        f = lift_by_turning_bands(f, m, hat_coefficient(c, step), (c,))
    grid = np.linspace(0.0, math.pi, 4097)
    vals = np.asarray(f(grid))
    if not np.all(np.isfinite(vals)):
        raise ConstructionError("lifted function is not finite on the grid")
    constant = max(0.0, -float(vals.min()))
    at_zero = float(f(np.array([0.0]))[0]) + constant
    if at_zero <= 0.0:
        raise ConstructionError("normalising constant is not positive")
    lifted = f
    bar = IsotropicFunction(evaluator=lambda t: (lifted(t) + constant) / at_zero,
                            breakpoints=(c,), label=f"lifted-hat(d'={dprime}, c={c:g})")
    second_diffs: list = []
    predicted_value = None
    if k >= 1:
        predicted_value = montee_deriv_at_zero(bar, 0)
    result = iterated_montee(bar, k).relabel(f"optimality-witness(d={d}, k={k}, c={c:g})")
    if k >= 1:
        ext = folded(result.evaluator)
        for h in (4e-2, 2e-2, 1e-2, 5e-3):
            pts = np.array([-h, 0.0, h])
            v = np.asarray(ext(pts))
            second_diffs.append(float((v[0] - 2 * v[1] + v[2]) / h ** 2))
    expected = 1 + (dprime - 1) // 2 + k
    probe = differentiability_probe(result, c, expected)
    return WitnessResult(result, d, k, c, dprime, expected, constant, probe,
                         second_diffs, predicted_value)
