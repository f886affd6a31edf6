"""Schoenberg sequences: projection, synthesis, conversion kernels and moments."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spherepd import model
from spherepd import schoenberg as sc
from spherepd.exceptions import (DimensionError, DivergenceError, DomainError, ParityError,
                                 QuadratureError)

INF = sc.INF
THETA = np.linspace(0.0, math.pi, 301)


def test_from_values_clamps_roundoff():
    seq = sc.SchoenbergSequence.from_values(3, [0.5, -1e-12, 0.5])
    assert seq.coefficients[1] == 0.0 and seq.normalized and seq.is_class
    bad = sc.SchoenbergSequence.from_values(3, [0.6, -0.1, 0.5])
    assert not bad.normalized and not bad.is_class


def test_sequence_is_immutable():
    seq = sc.SchoenbergSequence.unit(2, 3)
    with pytest.raises(ValueError):
        seq.coefficients[0] = 1.0


@pytest.mark.parametrize("bad", [0, -1, 2.5, "x"])
def test_dimension_validation(bad):
    with pytest.raises((DomainError, ValueError)):
        sc.SchoenbergSequence(bad, [1.0])


def test_json_round_trip():
    seq = sc.multiquadric_sequence(1.5, 0.4, INF)
    back = sc.SchoenbergSequence.from_json(seq.to_json())
    assert back.dimension == INF and back.truncated
    assert np.array_equal(back.coefficients, seq.coefficients)
    assert back.tail_mass == seq.tail_mass


def test_unit_sequence_synthesizes_normalized_gegenbauer():
    seq = sc.SchoenbergSequence.unit(3, 3)
    vals = sc.synthesize(seq, THETA)
    assert vals[0] == pytest.approx(1.0)
    x = np.cos(THETA)
    # on S^3 the basis is C_n^1, and C_3^1(x) = 8x^3 - 4x with C_3^1(1) = 4
    assert np.allclose(vals, (8 * x ** 3 - 4 * x) / 4, atol=1e-14)


@pytest.mark.parametrize("d, psi", [
    (1, model.make_multiquadric(1, 0.5)),
    (2, model.make_multiquadric(0.5, 0.3)),
    (3, model.make_wendland("C2", 4, 1.5)),
    (5, model.make_wendland("C4", 6, 2.0)),
])
def test_analyze_then_synthesize(d, psi):
    seq = sc.analyze(psi, d, N=96, strict=False)
    assert seq.total == pytest.approx(1.0, abs=1e-3)
    assert np.max(np.abs(sc.synthesize(seq, THETA) - psi(THETA))) < 1e-3


def test_analyze_smooth_inversion_tight():
    psi = model.make_multiquadric(1, 0.5)
    seq = sc.analyze(psi, 1, N=96)
    assert np.max(np.abs(sc.synthesize(seq, THETA) - psi(THETA))) < 1e-11


def test_analyze_infinite_dimension_refused():
    with pytest.raises(DimensionError):
        sc.analyze(model.make_cosine(), INF)


def test_analyze_cosine_exact():
    seq = sc.analyze(model.make_cosine(), 3, N=6)
    assert seq.coefficients[1] == pytest.approx(1.0, abs=1e-14)
    assert np.max(np.abs(np.delete(seq.coefficients, 1))) < 1e-14


def test_analyze_rejects_non_normalized_quadrature(monkeypatch):
    monkeypatch.setattr(sc, "_node_count", lambda N, d: 2)
    with pytest.raises(QuadratureError):
        sc.analyze(model.make_wendland("C2", 4, 0.3), 3, N=40)


@pytest.mark.parametrize("d", [2, 3, 6])
def test_synthesize_derivative_matches_difference(d):
    seq = sc.analyze(model.make_multiquadric(1, 0.4), d, N=60, strict=False)
    t = np.linspace(0.2, 2.9, 8)
    h = 1e-6
    fd = (sc.synthesize(seq, t + h) - sc.synthesize(seq, t - h)) / (2 * h)
    assert np.allclose(sc.synthesize_derivative(seq, t), fd, atol=1e-7)


def test_multiquadric_sequences_synthesize():
    for tau, delta, d in [(2.0, 0.5, INF), (1, 0.5, 1), (1, 0.3, 3), (1.5, 0.4, 4)]:
        seq = sc.multiquadric_sequence(tau, delta, d)
        psi = model.make_multiquadric(tau, delta)
        assert np.max(np.abs(sc.synthesize(seq, THETA) - psi(THETA))) < 1e-13


def test_multiquadric_d1_frozen_values():
    seq = sc.multiquadric_sequence(1, 0.5, 1)
    assert seq.coefficients[0] == pytest.approx(1 / 3, rel=1e-15)
    assert seq.coefficients[1] == pytest.approx(1 / 3, rel=1e-15)


def test_multiquadric_sequence_domain():
    with pytest.raises(DomainError):
        sc.multiquadric_sequence(2, 0.5, 1)
    with pytest.raises(DomainError):
        sc.multiquadric_sequence(1, 0.5, 4)


# kappa_4(6, 2) = 0.164794921875 exactly (mpmath); tau(4, 2) = 1/4
def test_kernel_values():
    assert sc.kernel_value("kappa", 6, 2, d=4) == pytest.approx(0.164794921875, rel=1e-13)
    assert sc.kernel_value("tau", 4, 2) == pytest.approx(0.25, rel=1e-14)
    with pytest.raises(ParityError):
        sc.kernel_value("tau", 4, 1)
    with pytest.raises(DomainError):
        sc.kernel_value("tau", 2, 4)
    with pytest.raises(DimensionError):
        sc.kernel_value("kappa", 4, 2, d=1)


@pytest.mark.parametrize("d", [2, 3, 5, INF])
def test_conversion_matrix_columns_sum_to_one(d):
    K = sc.conversion_matrix(d, 40)
    assert np.allclose(K.sum(axis=0), 1.0, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(d=st.sampled_from([2, 3, 4, 7]), seed=st.integers(0, 10_000))
def test_to_one_dim_preserves_function(d, seed):
    rng = np.random.default_rng(seed)
    b = rng.random(12)
    b /= b.sum()
    seq = sc.SchoenbergSequence(d, b)
    one = sc.to_one_dim(seq)
    assert one.is_class and one.total == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(sc.synthesize(one, THETA) - sc.synthesize(seq, THETA))) < 1e-12


def test_to_one_dim_preserves_parity():
    one = sc.to_one_dim(sc.SchoenbergSequence.unit(INF, 5))
    assert np.all(one.coefficients[::2] == 0.0)


def test_moment_sum_flags_truncated_divergence():
    seq = sc.analyze(model.make_wendland("C2", 4, 1.0), 3, N=64, strict=False)
    assert not sc.moment_sum(seq, 4).converged
    with pytest.raises(DivergenceError):
        sc.fourth_derivative_at_zero_from_sequence(seq)


def test_moment_sum_exact_finite_sequence():
    seq = sc.SchoenbergSequence(2, [0.5, 0.5])
    ms = sc.moment_sum(seq, 2)
    assert ms.converged and ms.value == 0.5


@pytest.mark.parametrize("d, tau", [(1, 1), (3, 1), (5, 2), (INF, 2)])
def test_derivatives_at_zero_from_sequence(d, tau):
    psi = model.make_multiquadric(tau, 0.3)
    seq = sc.multiquadric_sequence(tau, 0.3, d)
    assert sc.second_derivative_at_zero_from_sequence(seq) == pytest.approx(
        psi.second_derivative_at_zero, rel=1e-12)
    assert sc.fourth_derivative_at_zero_from_sequence(seq) == pytest.approx(
        model.even_derivative_at_zero(psi, 4), rel=1e-4)


def test_corner_bound():
    assert sc.corner_bound(1, 1.0) == pytest.approx(math.pi ** 2, rel=1e-15)
    assert sc.corner_bound(3, math.pi) == pytest.approx(4 / 3, rel=1e-15)
    with pytest.raises(DimensionError):
        sc.corner_bound(2, 1.0)
    with pytest.raises(DomainError):
        sc.corner_bound(1, 4.0)


def test_corner_bound_scaling():
    assert sc.corner_bound(3, 0.5) == pytest.approx(4 * sc.corner_bound(3, 1.0), rel=1e-15)


def test_wendland_second_moment_improves_with_truncation():
    # algebraic coefficient decay: the truncated n^2 moment misses roughly 2/N of psi''(0)
    psi = model.make_wendland("C2", 4, 1.5)
    errors = []
    for N in (128, 500):
        b = sc.analyze(psi, 1, N, strict=False).coefficients
        n = np.arange(b.size)
        errors.append(abs(-np.sum(b * n * n) / psi.second_derivative_at_zero - 1.0))
    assert errors[1] < 0.5 * errors[0] and errors[1] < 1e-2
