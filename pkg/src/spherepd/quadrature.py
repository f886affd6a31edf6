"""Gauss-Legendre rules and panel integration on subintervals of [0, pi]."""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

ArrayFunc = Callable[[np.ndarray], np.ndarray]

PANEL_NODES = 20
DEFAULT_PANELS = 64


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    if n < 1:
        raise ValueError("n must be positive")
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def mapped_rule(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def split_points(a: float, b: float, breakpoints: Iterable[float] = ()) -> list[float]:
    """Sorted interval endpoints for [a, b] with interior breakpoints inserted."""
    inner = sorted({float(p) for p in breakpoints if a < p < b})
    return [float(a), *inner, float(b)]


def composite_rule(
    a: float, b: float, n: int, breakpoints: Iterable[float] = ()
) -> tuple[np.ndarray, np.ndarray]:
    """n-point Gauss rule applied on each piece of [a, b] split at breakpoints."""
    edges = split_points(a, b, breakpoints)
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            x, w = mapped_rule(lo, hi, n)
            nodes.append(x)
            weights.append(w)
    if not nodes:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(nodes), np.concatenate(weights)


def panel_edges(a: float, b: float, breakpoints: Iterable[float] = (),
                panels: int = DEFAULT_PANELS) -> np.ndarray:
    uniform = np.linspace(a, b, panels + 1)
    extra = [p for p in breakpoints if a < p < b]
    edges = np.unique(np.concatenate([uniform, np.asarray(extra, dtype=float)]))
    # drop slivers created by breakpoints landing next to a uniform edge
    keep = np.concatenate([[True], np.diff(edges) > 1e-13 * max(1.0, abs(b - a))])
    edges = edges[keep]
    edges[-1] = b
    return edges


def integrate(f: ArrayFunc, a: float, b: float, breakpoints: Iterable[float] = (),
              panels: int = DEFAULT_PANELS) -> float:
    """Composite Gauss-Legendre integral of a vectorised f over [a, b]."""
    if b == a:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    npan = max(1, int(np.ceil(panels * (b - a) / np.pi)))
    edges = panel_edges(a, b, breakpoints, npan)
    x, w = gauss_legendre(PANEL_NODES)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    vals = np.asarray(f(nodes.ravel()), dtype=float).reshape(nodes.shape)
    return sign * float(np.sum(vals * (0.5 * (hi - lo) * w)))


class PanelIntegral:
    """Cumulative integral of g over [lower, upper] with exact partial panels.

    ``head(t)`` returns the integral over [lower, t], ``tail(t)`` over [t, upper].
    g is evaluated once on all panel nodes; each query costs one partial panel.
    """

    def __init__(self, g: ArrayFunc, lower: float = 0.0, upper: float = np.pi,
                 breakpoints: Sequence[float] = (), panels: int = DEFAULT_PANELS):
        self.g = g
        self.lower = float(lower)
        self.upper = float(upper)
        self.edges = panel_edges(self.lower, self.upper, breakpoints, panels)
        x, w = gauss_legendre(PANEL_NODES)
        lo, hi = self.edges[:-1, None], self.edges[1:, None]
        nodes = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        vals = np.asarray(g(nodes.ravel()), dtype=float).reshape(nodes.shape)
        pieces = np.sum(vals * (0.5 * (hi - lo) * w), axis=1)
        # cum[i] = integral over [edges[0], edges[i]]
        self.cum = np.concatenate([[0.0], np.cumsum(pieces)])
        # rcum[i] = integral over [edges[i], edges[-1]], summed from the right
        self.rcum = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
        self.total = float(self.cum[-1])

    def _partial(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        x, w = gauss_legendre(PANEL_NODES)
        half = 0.5 * (b - a)
        nodes = half[:, None] * x + (0.5 * (a + b))[:, None]
        vals = np.asarray(self.g(nodes.ravel()), dtype=float).reshape(nodes.shape)
        return np.sum(vals * w, axis=1) * half

    def _locate(self, t: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.edges, t, side="right") - 1
        return np.clip(idx, 0, len(self.edges) - 2)

    def head(self, t) -> np.ndarray:
        t = np.clip(np.atleast_1d(np.asarray(t, dtype=float)), self.lower, self.upper)
        idx = self._locate(t)
        return self.cum[idx] + self._partial(self.edges[idx], t)

    def tail(self, t) -> np.ndarray:
        t = np.clip(np.atleast_1d(np.asarray(t, dtype=float)), self.lower, self.upper)
        idx = self._locate(t)
        return self.rcum[idx + 1] + self._partial(t, self.edges[idx + 1])
