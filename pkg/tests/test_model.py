"""Isotropic function families and finite-difference helpers."""

import math

import numpy as np
import pytest
import sympy as sp

from spherepd import model, operators as op
from spherepd.exceptions import DomainError, StepUnderflowError

GRID = np.linspace(0.0, math.pi, 401)


def test_constant_and_cosine():
    assert model.make_constant()(1.3) == 1.0
    assert model.make_cosine()(math.pi) == -1.0


def test_scalar_and_array_calls():
    psi = model.make_multiquadric(1, 0.5)
    assert isinstance(psi(0.3), float)
    assert psi(np.array([0.1, 0.2])).shape == (2,)


@pytest.mark.parametrize("tau, delta", [(1, 0.5), (2.5, 0.3), (4, 0.8)])
def test_multiquadric_at_ends(tau, delta):
    psi = model.make_multiquadric(tau, delta)
    assert psi(0.0) == pytest.approx(1.0, rel=1e-15)
    assert psi(math.pi) == pytest.approx(((1 - delta) / (1 + delta)) ** (2 * tau), rel=1e-13)


@pytest.mark.parametrize("tau, delta", [(1, 0.2), (3, 0.7)])
def test_multiquadric_metadata(tau, delta):
    psi = model.make_multiquadric(tau, delta)
    t = np.linspace(0.2, 3.0, 7)
    h = 1e-6
    assert np.allclose(psi.derivative(t), (psi(t + h) - psi(t - h)) / (2 * h), rtol=1e-7, atol=1e-10)
    assert psi.second_derivative_at_zero == pytest.approx(model.even_derivative_at_zero(psi, 2), rel=1e-6)


@pytest.mark.parametrize("bad", [(0, 0.5), (1, 0.0), (1, 1.0)])
def test_multiquadric_domain(bad):
    with pytest.raises(DomainError):
        model.make_multiquadric(*bad)


@pytest.mark.parametrize("kind, tau, c", [("C2", 4, 1.0), ("C2", 5, 2.5), ("C4", 6, 1.5), ("C4", 7, 3.0)])
def test_wendland_metadata(kind, tau, c):
    psi = model.make_wendland(kind, tau, c)
    assert psi(0.0) == 1.0
    assert psi(c) == 0.0 and psi(min(math.pi, c + 0.1)) == 0.0
    t = np.linspace(0.1, c - 0.1, 6)
    h = 1e-6
    assert np.allclose(psi.derivative(t), (psi(t + h) - psi(t - h)) / (2 * h), rtol=1e-6, atol=1e-9)
    # C2 carries a |theta|^3 term at zero, so the stencil error is O(h) there
    rel = 1e-3 if kind == "C2" else 1e-5
    assert psi.second_derivative_at_zero == pytest.approx(model.even_derivative_at_zero(psi, 2), rel=rel)
    assert psi.kinks == (c,)


@pytest.mark.parametrize("args", [("C2", 3, 1.0), ("C4", 5, 1.0), ("C2", 4, 3.5), ("C3", 4, 1.0)])
def test_wendland_domain(args):
    with pytest.raises(DomainError):
        model.make_wendland(*args)


def test_gaspari_cohn_derivative_relation_symbolic():
    """The descente profile equals -3 phi'(t) / (40 t) on both pieces."""
    t = sp.symbols("t", positive=True)
    inner = 1 - sp.Rational(20, 3) * t ** 2 + 5 * t ** 3 + 8 * t ** 4 - 8 * t ** 5
    outer = (8 * t ** 2 + 8 * t - 1) * (1 - t) ** 4 / (3 * t)
    tilde_in = 1 - sp.Rational(9, 8) * t - sp.Rational(12, 5) * t ** 2 + 3 * t ** 3
    tilde_out = (-1 - 3 * t + 24 * t ** 2 + 40 * t ** 3) * (1 / t - 1) ** 3 / 40
    assert sp.simplify(-3 * sp.diff(inner, t) / (40 * t) - tilde_in) == 0
    assert sp.simplify(-3 * sp.diff(outer, t) / (40 * t) - tilde_out) == 0


def test_gaspari_cohn_profile_continuity():
    eps = 1e-9
    for f in (model.gaspari_cohn_profile, model.gaspari_cohn_profile_derivative, model.gaspari_cohn_tilde):
        assert f(0.5 - eps) == pytest.approx(f(0.5 + eps), abs=1e-7)
        assert abs(f(1.0 - eps)) < 1e-7
    assert model.gaspari_cohn_profile(0.0) == 1.0


@pytest.mark.parametrize("construction", ["lift", "restrict"])
@pytest.mark.parametrize("c", [1.0, 2.5])
def test_gaspari_cohn_descente_closed_form(construction, c):
    psi = model.make_gaspari_cohn_sphere(c, construction)
    assert psi.support_radius == pytest.approx(c, rel=1e-14)
    num = op.descente_numeric(psi).result_function
    ref = model.make_gaspari_cohn_descente(c, construction)
    assert np.max(np.abs(num(GRID) - ref(GRID))) < 1e-8


@pytest.mark.parametrize("kind, tau, c", [("C2", 4, 1.2), ("C4", 6, 2.0)])
def test_wendland_descente_closed_form(kind, tau, c):
    num = op.descente_numeric(model.make_wendland(kind, tau, c)).result_function
    ref = model.make_wendland_descente(kind, tau, c)
    assert np.max(np.abs(num(GRID) - ref(GRID))) < 1e-10


@pytest.mark.parametrize("tau, delta", [(1, 0.3), (2, 0.5), (3.5, 0.8)])
def test_multiquadric_montee_closed_form(tau, delta):
    num = op.montee_numeric(model.make_multiquadric(tau, delta)).result_function
    ref = model.make_multiquadric_montee(tau, delta)
    assert np.max(np.abs(num(GRID) - ref(GRID))) < 1e-10


def test_multiquadric_montee_frozen_value():
    # (2 log 1.5 - log(1.25 - cos 1)) / (2 log 1.5 - 2 log 0.5), mpmath
    assert model.make_multiquadric_montee(1, 0.5)(1.0) == pytest.approx(0.52513812682093389, rel=1e-14)


def test_wendland_descente_frozen_value():
    # (0.7 / sin 0.7)(1 - 0.35)^3, mpmath
    assert model.make_wendland_descente("C2", 4, 2.0)(0.7) == pytest.approx(0.29840456697841629, rel=1e-14)


def test_yadrenko_support_and_breakpoints():
    psi = model.yadrenko_lift(model.make_gaspari_cohn(1.0))
    assert psi.support_radius == pytest.approx(2 * math.asin(0.5), rel=1e-15)
    assert psi.breakpoints == pytest.approx((2 * math.asin(0.25),))


def test_restrict_requires_support_in_range():
    with pytest.raises(DomainError):
        model.restrict_to_sphere(model.make_gaspari_cohn(4.0))


def test_truncated_linear():
    psi = model.make_truncated_linear(1.0)
    assert psi(0.25) == 0.75 and psi(2.0) == 0.0
    assert math.isnan(psi.derivative(1.0))
    with pytest.raises(DomainError):
        model.make_truncated_linear(math.pi)


def test_folded_extension():
    g = model.folded(lambda t: t)
    assert np.allclose(g(np.array([-0.5, 0.5, 2 * math.pi - 0.5, 2 * math.pi + 0.5])), 0.5)


def test_numeric_derivative_orders():
    f = model.IsotropicFunction(evaluator=np.cos)
    for order, expected, tol in [(1, -math.sin(1.0), 1e-9), (2, -math.cos(1.0), 1e-6),
                                 (3, math.sin(1.0), 1e-6), (4, math.cos(1.0), 1e-5), (5, -math.sin(1.0), 1e-4)]:
        assert model.numeric_derivative(f, order, 1.0) == pytest.approx(expected, abs=tol)


def test_numeric_derivative_endpoint_guard():
    with pytest.raises(StepUnderflowError):
        model.numeric_derivative(model.make_cosine(), 3, 0.001)
    with pytest.raises(DomainError):
        model.fd_step(6)


def test_even_derivative_at_zero():
    psi = model.make_multiquadric(2, 0.4)
    assert model.even_derivative_at_zero(psi, 2) == pytest.approx(psi.second_derivative_at_zero, rel=1e-6)
