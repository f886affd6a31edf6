"""Isotropic functions on [0, pi], radial functions on [0, inf) and named families."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .exceptions import DomainError, StepUnderflowError

ArrayFunc = Callable[[np.ndarray], np.ndarray]


def _scalarize(fun: ArrayFunc, theta):
    th = np.asarray(theta, dtype=float)
    out = np.asarray(fun(th), dtype=float)
    if th.ndim == 0:
        return float(out)
    return np.broadcast_to(out, th.shape).copy()


@dataclass(frozen=True)
class IsotropicFunction:
    """A function psi on [0, pi] with optional analytic metadata.

    ``breakpoints`` lists interior points where psi or one of its derivatives is
    not smooth; quadrature splits there.  ``second_derivative_at_zero`` refers to
    the even extension psi(|theta|).
    """

    evaluator: ArrayFunc
    derivative_evaluator: Optional[ArrayFunc] = None
    second_derivative_at_zero: Optional[float] = None
    support_radius: Optional[float] = None
    label: str = "custom"
    breakpoints: tuple = ()
    params: dict = field(default_factory=dict)

    def __call__(self, theta):
        return _scalarize(self.evaluator, theta)

    def derivative(self, theta):
        if self.derivative_evaluator is None:
            return _scalarize(lambda t: np.vectorize(
                lambda s: numeric_derivative(self, 1, s))(t), theta)
        return _scalarize(self.derivative_evaluator, theta)

    @property
    def kinks(self) -> tuple:
        pts = list(self.breakpoints)
        if self.support_radius is not None and self.support_radius < math.pi:
            pts.append(self.support_radius)
        return tuple(sorted(set(pts)))

    def relabel(self, label: str) -> "IsotropicFunction":
        return replace(self, label=label)


@dataclass(frozen=True)
class RadialFunction:
    """A radial profile phi on [0, inf)."""

    evaluator: ArrayFunc
    derivative_evaluator: Optional[ArrayFunc] = None
    second_derivative_at_zero: Optional[float] = None
    support_radius: Optional[float] = None
    label: str = "radial"
    breakpoints: tuple = ()

    def __call__(self, t):
        return _scalarize(self.evaluator, t)


def _truncated_power(u: np.ndarray, tau: float) -> np.ndarray:
    """(1 - u)_+^tau computed as exp(tau log1p(-u)) below the cutoff."""
    out = np.zeros_like(u)
    inside = u < 1.0
    out[inside] = np.exp(tau * np.log1p(-u[inside]))
    return out


def make_constant() -> IsotropicFunction:
    return IsotropicFunction(
        evaluator=lambda t: np.ones_like(np.asarray(t, dtype=float)),
        derivative_evaluator=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        second_derivative_at_zero=0.0,
        label="constant",
    )


def make_cosine() -> IsotropicFunction:
    return IsotropicFunction(
        evaluator=np.cos,
        derivative_evaluator=lambda t: -np.sin(t),
        second_derivative_at_zero=-1.0,
        label="cos",
    )


def make_multiquadric(tau: float, delta: float) -> IsotropicFunction:
    """psi(theta) = (1 - delta)^(2 tau) / (1 + delta^2 - 2 delta cos theta)^tau."""
    if not tau > 0:
        raise DomainError(f"multiquadric needs tau > 0, got {tau}")
    if not 0 < delta < 1:
        raise DomainError(f"multiquadric needs delta in (0, 1), got {delta}")
    log_scale = 2.0 * tau * math.log1p(-delta)

    def base(t):
        return 1.0 + delta * delta - 2.0 * delta * np.cos(t)

    def value(t):
        t = np.asarray(t, dtype=float)
        return np.exp(log_scale - tau * np.log(base(t)))

    def deriv(t):
        t = np.asarray(t, dtype=float)
        return -2.0 * delta * tau * np.sin(t) * np.exp(log_scale - (tau + 1.0) * np.log(base(t)))

    return IsotropicFunction(
        evaluator=value,
        derivative_evaluator=deriv,
        second_derivative_at_zero=-2.0 * delta * tau / (1.0 - delta) ** 2,
        label=f"multiquadric(tau={tau:g}, delta={delta:g})",
        params={"family": "multiquadric", "tau": tau, "delta": delta},
    )


def make_wendland(kind: str, tau: float, c: float) -> IsotropicFunction:
    """C2 or C4 Wendland function in the geodesic distance with support [0, c]."""
    kind = kind.upper()
    if not 0 < c < math.pi:
        raise DomainError(f"Wendland support c must lie in (0, pi), got {c}")
    if kind == "C2":
        if tau < 4:
            raise DomainError("C2-Wendland needs tau >= 4")

        def value(t):
            u = np.asarray(t, dtype=float) / c
            return (1.0 + tau * u) * _truncated_power(u, tau)

        def deriv(t):
            u = np.asarray(t, dtype=float) / c
            return -tau * (tau + 1.0) / c * u * _truncated_power(u, tau - 1.0)

        second = -tau * (1.0 + tau) / c ** 2
    elif kind == "C4":
        if tau < 6:
            raise DomainError("C4-Wendland needs tau >= 6")

        def value(t):
            u = np.asarray(t, dtype=float) / c
            return (1.0 + tau * u + (tau * tau - 1.0) / 3.0 * u * u) * _truncated_power(u, tau)

        def deriv(t):
            u = np.asarray(t, dtype=float) / c
            return (-(tau + 1.0) * (tau + 2.0) / (3.0 * c) * u * (1.0 + (tau - 1.0) * u)
                    * _truncated_power(u, tau - 1.0))

        second = -(tau + 1.0) * (tau + 2.0) / (3.0 * c ** 2)
    else:
        raise DomainError(f"unknown Wendland kind {kind!r}; use 'C2' or 'C4'")
    return IsotropicFunction(
        evaluator=value,
        derivative_evaluator=deriv,
        second_derivative_at_zero=second,
        support_radius=c,
        label=f"wendland-{kind.lower()}(tau={tau:g}, c={c:g})",
        params={"family": f"wendland-{kind.lower()}", "tau": tau, "c": c},
    )


def gaspari_cohn_profile(t) -> np.ndarray:
    """Gaspari-Cohn piecewise rational profile with support [0, 1]."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    a = t <= 0.5
    b = (t > 0.5) & (t < 1.0)
    ta, tb = t[a], t[b]
    out[a] = 1.0 + ta * ta * (-20.0 / 3.0 + ta * (5.0 + ta * (8.0 - 8.0 * ta)))
    out[b] = (8.0 * tb * tb + 8.0 * tb - 1.0) * (1.0 - tb) ** 4 / (3.0 * tb)
    return out


def gaspari_cohn_profile_derivative(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    a = t <= 0.5
    b = (t > 0.5) & (t < 1.0)
    ta, tb = t[a], t[b]
    out[a] = ta * (-40.0 / 3.0 + ta * (15.0 + ta * (32.0 - 40.0 * ta)))
    g = 8.0 * tb + 8.0 - 1.0 / tb
    out[b] = (1.0 - tb) ** 3 * ((8.0 + 1.0 / tb ** 2) * (1.0 - tb) - 4.0 * g) / 3.0
    return out


def gaspari_cohn_tilde(t) -> np.ndarray:
    """The profile -3 phi_GC'(t) / (40 t) produced by the descente of Gaspari-Cohn."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    a = t <= 0.5
    b = (t > 0.5) & (t < 1.0)
    ta, tb = t[a], t[b]
    out[a] = 1.0 + ta * (-9.0 / 8.0 + ta * (-12.0 / 5.0 + 3.0 * ta))
    out[b] = (-1.0 - 3.0 * tb + 24.0 * tb ** 2 + 40.0 * tb ** 3) * (1.0 / tb - 1.0) ** 3 / 40.0
    return out


def make_gaspari_cohn(c: float) -> RadialFunction:
    """phi_c(t) = phi_GC(t / c), a radial positive definite function on R^3."""
    if not c > 0:
        raise DomainError("Gaspari-Cohn scale must be positive")
    return RadialFunction(
        evaluator=lambda t: gaspari_cohn_profile(np.asarray(t, dtype=float) / c),
        derivative_evaluator=lambda t: gaspari_cohn_profile_derivative(
            np.asarray(t, dtype=float) / c) / c,
        second_derivative_at_zero=-40.0 / (3.0 * c * c),
        support_radius=c,
        label=f"gaspari-cohn(c={c:g})",
        breakpoints=(0.5 * c,),
    )


def make_radial_hat(c: float) -> RadialFunction:
    return RadialFunction(
        evaluator=lambda t: np.maximum(0.0, 1.0 - np.asarray(t, dtype=float) / c),
        derivative_evaluator=lambda t: np.where(np.asarray(t) < c, -1.0 / c, 0.0),
        support_radius=c,
        label=f"radial-hat(c={c:g})",
    )


def yadrenko_lift(phi: RadialFunction) -> IsotropicFunction:
    """theta -> phi(2 sin(theta / 2)), the chordal-distance restriction of phi."""

    def chord(t):
        return 2.0 * np.sin(0.5 * np.asarray(t, dtype=float))

    def arc(s):
        return 2.0 * math.asin(min(1.0, 0.5 * s))

    def chord_derivative(t):
        t = np.asarray(t, dtype=float)
        return phi.derivative_evaluator(chord(t)) * np.cos(0.5 * t)

    deriv = chord_derivative if phi.derivative_evaluator is not None else None

    support = None
    if phi.support_radius is not None and phi.support_radius <= 2.0:
        support = arc(phi.support_radius)
    return IsotropicFunction(
        evaluator=lambda t: phi.evaluator(chord(t)),
        derivative_evaluator=deriv,
        second_derivative_at_zero=phi.second_derivative_at_zero,
        support_radius=support,
        label=f"yadrenko[{phi.label}]",
        breakpoints=tuple(arc(b) for b in phi.breakpoints if b < 2.0),
    )


def restrict_to_sphere(phi: RadialFunction) -> IsotropicFunction:
    """phi restricted to [0, pi]; phi must vanish beyond pi."""
    if phi.support_radius is None or phi.support_radius > math.pi:
        raise DomainError("restriction needs a radial function supported in [0, pi]")
    return IsotropicFunction(
        evaluator=phi.evaluator,
        derivative_evaluator=phi.derivative_evaluator,
        second_derivative_at_zero=phi.second_derivative_at_zero,
        support_radius=phi.support_radius,
        label=f"restricted[{phi.label}]",
        breakpoints=tuple(b for b in phi.breakpoints if b < math.pi),
    )


def make_gaspari_cohn_sphere(c: float, construction: str = "lift") -> IsotropicFunction:
    """Compactly supported Gaspari-Cohn member with support [0, c] on the sphere.

    ``lift`` gives the chordal construction (class Psi_2^+); ``restrict`` the
    geodesic restriction (class Psi_3^+).
    """
    if not 0 < c <= math.pi:
        raise DomainError("support must lie in (0, pi]")
    if construction == "lift":
        return yadrenko_lift(make_gaspari_cohn(2.0 * math.sin(0.5 * c)))
    if construction == "restrict":
        return restrict_to_sphere(make_gaspari_cohn(c))
    raise DomainError(f"unknown construction {construction!r}")


def make_gaspari_cohn_descente(c: float, construction: str = "lift") -> IsotropicFunction:
    """Closed forms of the descente of the two spherical Gaspari-Cohn members."""
    if construction == "lift":
        s = math.sin(0.5 * c)
        value = lambda t: gaspari_cohn_tilde(np.sin(0.5 * np.asarray(t, dtype=float)) / s)
    elif construction == "restrict":
        def value(t):
            t = np.asarray(t, dtype=float)
            ratio = np.ones_like(t)
            nz = t > 0
            ratio[nz] = t[nz] / np.sin(t[nz])
            return ratio * gaspari_cohn_tilde(t / c)
    else:
        raise DomainError(f"unknown construction {construction!r}")
    return IsotropicFunction(
        evaluator=value,
        support_radius=c,
        label=f"gaspari-cohn-descente-{construction}(c={c:g})",
        breakpoints=(_gc_mid(c, construction),),
    )


def _gc_mid(c, construction):
    if construction == "lift":
        return 2.0 * math.asin(0.5 * math.sin(0.5 * c))
    return 0.5 * c


def make_truncated_linear(c: float) -> IsotropicFunction:
    """The hat function (1 - theta / c)_+, a member of Psi_1 with a kink at c."""
    if not 0 < c < math.pi:
        raise DomainError("c must lie in (0, pi)")

    def deriv(t):
        t = np.asarray(t, dtype=float)
        return np.where(t < c, -1.0 / c, np.where(t > c, 0.0, np.nan))

    return IsotropicFunction(
        evaluator=lambda t: np.maximum(0.0, 1.0 - np.asarray(t, dtype=float) / c),
        derivative_evaluator=deriv,
        support_radius=c,
        label=f"truncated-linear(c={c:g})",
        params={"family": "truncated-linear", "c": c},
    )


def make_wendland_descente(kind: str, tau: float, c: float) -> IsotropicFunction:
    """Closed form (theta / sin theta) p(theta / c) (1 - theta / c)_+^(tau - 1)."""
    kind = kind.upper()

    def value(t):
        t = np.asarray(t, dtype=float)
        u = t / c
        ratio = np.ones_like(t)
        nz = t > 0
        ratio[nz] = t[nz] / np.sin(t[nz])
        poly = 1.0 + (tau - 1.0) * u if kind == "C4" else 1.0
        return ratio * poly * _truncated_power(u, tau - 1.0)

    return IsotropicFunction(evaluator=value, support_radius=c,
                             label=f"wendland-{kind.lower()}-descente(tau={tau:g}, c={c:g})")


def make_multiquadric_montee(tau: float, delta: float) -> IsotropicFunction:
    """Closed form of the montee of the multiquadric."""
    if tau == 1:
        num0 = 2.0 * math.log1p(delta)
        den = 2.0 * math.log1p(delta) - 2.0 * math.log1p(-delta)
        value = lambda t: (num0 - np.log(1.0 + delta * delta - 2.0 * delta
                                          * np.cos(np.asarray(t, dtype=float)))) / den
    else:
        # translated and rescaled multiquadric of index tau - 1, vanishing at pi
        floor = ((1.0 - delta) / (1.0 + delta)) ** (2.0 * (tau - 1.0))

        def value(t):
            t = np.asarray(t, dtype=float)
            base = ((1.0 - delta) ** (2.0 * (tau - 1.0))
                    / (1.0 + delta * delta - 2.0 * delta * np.cos(t)) ** (tau - 1.0))
            return (base - floor) / (1.0 - floor)
    return IsotropicFunction(evaluator=value,
                             label=f"multiquadric-montee(tau={tau:g}, delta={delta:g})")


# -- finite differences -------------------------------------------------------

_FD_STEP = {3: 5e-3, 4: 1e-2, 5: 2e-2}


def fd_step(order: int, theta: float = 0.0) -> float:
    """Default central-difference step for the given derivative order."""
    if order == 1:
        return max(1e-5, abs(theta) * 1e-7)
    if order == 2:
        return 1e-4
    try:
        return _FD_STEP[order]
    except KeyError:
        raise DomainError("finite-difference orders above 5 are not supported") from None


def central_difference(fun: ArrayFunc, order: int, theta: float, h: float) -> float:
    """Plain m-th central difference sum_i (-1)^i C(m, i) f(theta + (m/2 - i) h) / h^m."""
    i = np.arange(order + 1)
    coef = np.array([(-1) ** k * math.comb(order, k) for k in i], dtype=float)
    pts = theta + (0.5 * order - i) * h
    vals = np.asarray(fun(pts), dtype=float)
    return float(math.fsum(coef * vals) / h ** order)


def richardson_difference(fun: ArrayFunc, order: int, theta: float, h: float) -> float:
    coarse = central_difference(fun, order, theta, h)
    fine = central_difference(fun, order, theta, 0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def folded(f) -> ArrayFunc:
    """The 2 pi-periodic even extension of f, evaluated by folding into [0, pi]."""

    def g(t):
        t = np.abs(np.asarray(t, dtype=float))
        t = np.mod(t, 2.0 * math.pi)
        return f(np.where(t > math.pi, 2.0 * math.pi - t, t))

    return g


def numeric_derivative(f, order: int, theta: float, h: Optional[float] = None) -> float:
    """Central finite-difference derivative of f at an interior theta.

    Orders 1 and 2 use a single O(h^2) stencil; orders 3-5 add one Richardson step.
    """
    if int(order) != order or order < 1:
        raise DomainError("order must be a positive integer")
    step = fd_step(order, theta) if h is None else h
    if theta - order * step < 0.0 or theta + order * step > math.pi:
        raise StepUnderflowError(
            f"theta={theta} is within {order}*h={order * step:g} of the endpoints")
    fun = f.evaluator if hasattr(f, "evaluator") else f
    if order <= 2:
        return central_difference(fun, order, theta, step)
    return richardson_difference(fun, order, theta, step)


def even_derivative_at_zero(f, order: int, h: Optional[float] = None) -> float:
    """Derivative of the even extension f(|theta|) at zero by central differences."""
    fun = folded(f.evaluator if hasattr(f, "evaluator") else f)
    step = fd_step(order) if h is None else h
    if order <= 2:
        return central_difference(fun, order, 0.0, step)
    return richardson_difference(fun, order, 0.0, step)
