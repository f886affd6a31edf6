"""Empirical checks: Gram-matrix positive definiteness, class reports, smoothness probes."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .exceptions import DomainError, StepUnderflowError
from .schoenberg import INF, SchoenbergSequence

DEFAULT_SEEDS = (1, 2, 3, 5, 8)


# -- positive definiteness ---------------------------------------------------

def sample_sphere(d: int, n: int, seed: int) -> np.ndarray:
    """n distinct points on S^d as rows of an (n, d + 1) array (normalised Gaussians)."""
    if int(d) != d or d < 1:
        raise DomainError("d must be a positive integer")
    if n < 2:
        raise DomainError("need at least two points")
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n, d + 1))
    while True:
        norms = np.linalg.norm(pts, axis=1)
        bad = norms < 1e-12
        if bad.any():
            pts[bad] = rng.standard_normal((int(bad.sum()), d + 1))
            continue
        pts = pts / norms[:, None]
        _, first = np.unique(np.round(pts, 14), axis=0, return_index=True)
        if first.size == n:
            return pts
        dup = np.setdiff1d(np.arange(n), first)
        pts[dup] = rng.standard_normal((dup.size, d + 1))


def gram_matrix(psi, points: np.ndarray) -> np.ndarray:
    inner = np.clip(points @ points.T, -1.0, 1.0)
    theta = np.arccos(inner)
    np.fill_diagonal(theta, 0.0)
    G = np.asarray(psi(theta), dtype=float)
    return 0.5 * (G + G.T)


@dataclass(frozen=True)
class PDCheckReport:
    dimension: int
    n_points: int
    seed: int
    min_eigenvalue: float
    tolerance: float
    verdict: str
    label: str = ""

    @property
    def consistent(self) -> bool:
        return self.verdict == "pd-consistent"

    def to_dict(self) -> dict:
        return asdict(self)


def pd_check(psi, d: int, n: int = 60, seed: int = 1) -> PDCheckReport:
    """Smallest Gram eigenvalue of psi on n random points of S^d.

    A finite sample can only show consistency with positive definiteness; the
    verdict is 'pd-violated' when the minimum eigenvalue is below -1e-8 n.
    """
    pts = sample_sphere(d, n, seed)
    lam_min = float(np.linalg.eigvalsh(gram_matrix(psi, pts))[0])
    tol = 1e-8 * n
    verdict = "pd-violated" if lam_min < -tol else "pd-consistent"
    return PDCheckReport(int(d), int(n), int(seed), lam_min, tol, verdict,
                         getattr(psi, "label", ""))


# -- class report ------------------------------------------------------------

@dataclass(frozen=True)
class ClassReport:
    dimension: object
    nonnegative: bool
    normalized: bool
    total: float
    positive_even: int
    positive_odd: int
    available_even: int
    available_odd: int
    positive_indices: list = field(default_factory=list)
    caveat: str = ("finite truncation: infinitely many positive even/odd coefficients "
                   "cannot be certified")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["dimension"] = "inf" if self.dimension == INF else self.dimension
        return out


def class_report(seq: SchoenbergSequence) -> ClassReport:
    b = seq.coefficients
    idx = np.arange(b.size)
    pos = b > 0
    return ClassReport(
        dimension=seq.dimension,
        nonnegative=seq.is_class,
        normalized=seq.normalized and seq.normalization_ok(),
        total=seq.total,
        positive_even=int(np.sum(pos & (idx % 2 == 0))),
        positive_odd=int(np.sum(pos & (idx % 2 == 1))),
        available_even=int(np.sum(idx % 2 == 0)),
        available_odd=int(np.sum(idx % 2 == 1)),
        positive_indices=[int(i) for i in idx[pos]],
    )


# -- differentiability probe -------------------------------------------------

# coarsest one-sided step per derivative order
_PROBE_STEP = {0: 1e-3, 1: 1e-3, 2: 4e-3, 3: 1e-2, 4: 2e-2, 5: 3e-2}
_EXTRA_POINTS = 3
_LEVELS = 3


def one_sided_weights(order: int, npts: int, side: int) -> np.ndarray:
    """Weights w with sum_i w_i f(x0 + side i h) h^-order ~ f^(order)(x0 +/- 0)."""
    offsets = side * np.arange(npts, dtype=float)
    A = np.vander(offsets, npts, increasing=True).T / np.array(
        [math.factorial(p) for p in range(npts)])[:, None]
    rhs = np.zeros(npts)
    rhs[order] = 1.0
    return np.linalg.solve(A, rhs)


def _one_sided(fun, order, x0, h, side):
    npts = order + _EXTRA_POINTS
    w = one_sided_weights(order, npts, side)
    pts = x0 + side * h * np.arange(npts)
    return float(math.fsum(w * np.asarray(fun(pts), dtype=float)) / h ** order)


@dataclass
class OrderProbe:
    order: int
    steps: list
    left: list
    right: list
    gaps: list
    noise_floor: float
    passed: bool


@dataclass
class ProbeReport:
    theta0: float
    max_order: int
    orders: list
    first_failing_order: Optional[int]

    def to_dict(self) -> dict:
        return {"theta0": self.theta0, "max_order": self.max_order,
                "first_failing_order": self.first_failing_order,
                "orders": [asdict(o) for o in self.orders]}


def _gaps(fun, order, theta0, steps):
    left = [_one_sided(fun, order, theta0, h, -1) for h in steps]
    right = [_one_sided(fun, order, theta0, h, +1) for h in steps]
    return left, right, [abs(a - b) for a, b in zip(left, right)]


def probe_order(psi, theta0: float, order: int, h0: Optional[float] = None) -> OrderProbe:
    """Compare left and right one-sided estimates of one derivative order at theta0.

    The order fails when the left/right gap at the finest step exceeds ten times
    the gap a smooth control function of the same scale produces, and does not
    shrink under refinement.
    """
    fun = psi.evaluator if hasattr(psi, "evaluator") else psi
    base = _PROBE_STEP[order] if h0 is None else h0
    steps = [base / 2 ** i for i in range(_LEVELS)]
    reach = base * (order + _EXTRA_POINTS)
    if theta0 - reach < 0.0 or theta0 + reach > math.pi:
        raise StepUnderflowError(f"probe stencil at theta0={theta0} leaves [0, pi]")
    left, right, gaps = _gaps(fun, order, theta0, steps)
    window = theta0 + np.linspace(-reach, reach, 33)
    scale = float(np.max(np.abs(fun(window)))) or 1.0
    control = lambda t: scale * np.cos(np.asarray(t) - theta0 + 0.5)
    noise = max(_gaps(control, order, theta0, steps)[2])
    shrinking = gaps[-1] <= 0.5 * gaps[0]
    passed = gaps[-1] <= 10.0 * noise + 1e-300 or shrinking
    return OrderProbe(order, steps, left, right, gaps, noise, bool(passed))


def differentiability_probe(psi, theta0: float, max_order: int) -> ProbeReport:
    """One-sided derivative agreement at theta0 for orders 0..max_order (max 5)."""
    if not 1 <= max_order <= 5:
        raise DomainError("max_order must lie in 1..5")
    if not 0.0 < theta0 < math.pi:
        raise DomainError("theta0 must lie in (0, pi)")
    orders = [probe_order(psi, theta0, m) for m in range(max_order + 1)]
    failing = next((o.order for o in orders if not o.passed), None)
    return ProbeReport(float(theta0), int(max_order), orders, failing)
