"""Kernel moment sums, their limit constants and the tau-moment probe."""

import csv
import io
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spherepd import asymptotics as asy
from spherepd import schoenberg as sc
from spherepd.exceptions import DomainError


# kappa values frozen from mpmath at 40 digits
@pytest.mark.parametrize("d, j, n, expected", [
    (4, 6, 2, 0.164794921875),
    (2, 4000, 1234, 0.00016729277265994198),
    (7, 3001, 555, 0.00058228460852572778),
])
def test_kappa_frozen(d, j, n, expected):
    assert float(asy.kappa(d, j, n)) == pytest.approx(expected, rel=1e-13)


def test_kappa_three_is_uniform():
    j = 40
    n = np.arange(0, j + 1, 2)
    assert np.allclose(asy.kappa(3, j, n), 1.0 / (j + 1), rtol=1e-14)


def test_kappa_matches_loggamma_at_small_j():
    for d in (2, 4, 5):
        for j, n in [(6, 2), (9, 3), (12, 12)]:
            assert float(asy.kappa(d, j, n)) == pytest.approx(sc.kernel_value("kappa", j, n, d), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(d=st.integers(2, 9), j=st.integers(2, 6000), data=st.data())
def test_kappa_recursion_identity(d, j, data):
    n = data.draw(st.integers(0, j // 2)) * 2 + (j % 2)
    n = min(n, j)
    direct = float(asy.kappa(d + 2, j, n))
    recursive = float(asy.kappa_recursive(d, j, n))
    assert recursive == pytest.approx(direct, rel=1e-12)


# Gamma(x + 1/2) / Gamma(x) frozen from mpmath; lgamma differences lose digits at large x
@pytest.mark.parametrize("x, expected", [
    (0.75, 0.73966877979715972308), (3.0, 1.6616754852239212756),
    (25.0, 4.9750640535227740967), (1e4, 99.998750007812988275)])
def test_half_ratio_frozen(x, expected):
    assert float(asy.half_ratio(x)) == pytest.approx(expected, rel=2e-15)


def test_kappa_moment_sum_d3_l0():
    for j in (1, 5, 40):
        assert asy.kappa_moment_sum(3, 0, j) == pytest.approx(2 * j / (2 * j + 1), rel=1e-14)


def test_kappa_moment_sum_d2_frozen():
    # 2 sum_{n=1}^{10} kappa_2(20, 2n), mpmath
    assert asy.kappa_moment_sum(2, 0, 10) == pytest.approx(0.96895459886582103, rel=1e-13)


def test_kappa_moment_single_term():
    for d in (2, 4, 6):
        assert asy.kappa_moment_sum(d, 0, 1) == pytest.approx(2 * sc.kernel_value("kappa", 2, 2, d), rel=1e-13)


@pytest.mark.parametrize("l, expected", [
    (0, 1.0), (1, 1.2732395447351627), (2, 2.0), (3, 3.3953054526271005), (4, 6.0)])
def test_c2_constant_frozen(l, expected):
    assert asy.c_d_constant(2, l) == pytest.approx(expected, rel=1e-14)


def test_c_constant_small_cases():
    assert asy.c_d_constant(3, 0) == 1.0
    assert asy.c_d_constant(3, 3) == 2.0
    assert asy.c_d_constant(5, 0) == pytest.approx(1.0, rel=1e-15)
    for d in range(2, 9):
        assert asy.c_d_constant(d, 0) == pytest.approx(1.0, rel=1e-13)
    with pytest.raises(DomainError):
        asy.c_d_constant(1, 0)


@pytest.mark.parametrize("d", [2, 4, 7])
@pytest.mark.parametrize("parity", asy.PARITIES)
def test_kappa_moment_sum_approaches_constant(d, parity):
    l = 2
    err = [abs(asy.kappa_moment_sum(d, l, j, parity) / j ** l - asy.c_d_constant(d, l)) for j in (500, 5000)]
    assert err[1] < err[0] < 0.05 * asy.c_d_constant(d, l)


# -- tau sums ---------------------------------------------------------------------

def test_tau_examples():
    assert asy.tau_sum_exact(2, 17, "even") == 34
    assert asy.tau_sum_exact(4, 10, "even") == 1160
    assert asy.tau_sum_exact(0, 2, "even") == Fraction(5, 8)


@pytest.mark.parametrize("parity", asy.PARITIES)
@pytest.mark.parametrize("l", [0, 2, 4])
def test_tau_closed_forms_exact(parity, l):
    for j in range(1, asy.EXACT_J_MAX + 1):
        rep = asy.tau_moment_sum(l, j, parity)
        assert rep.exact_match, (l, j, parity)


def test_odd_sums_differ_from_even_formulas():
    # the odd sums follow the top index 2j - 1, not 2j
    for j in (1, 7, 20):
        assert asy.tau_sum_exact(2, j, "odd") == 2 * j - 1
        assert asy.tau_sum_exact(4, j, "odd") == (2 * j - 1) * (6 * j - 5)
        assert asy.tau_sum_exact(2, j, "odd") != asy.literal_closed_form(2, j)
    assert asy.tau_sum_exact(0, 9, "odd") == 1


@pytest.mark.parametrize("parity", asy.PARITIES)
def test_tau_float_matches_closed_form(parity):
    for j in (1, 10, 137, 1000):
        for l in (0, 2, 4):
            assert asy.tau_moment_sum(l, j, parity).relative_error < 1e-12


def test_tau_float_matches_exact_for_other_powers():
    for l in (6, 8):
        assert asy.tau_sum_float(l, 25, "odd") == pytest.approx(float(asy.tau_sum_exact(l, 25, "odd")), rel=1e-13)


def test_log_tau_weights_match_loggamma():
    j = 300
    _, lower = asy._indices(j, "even")
    assert np.allclose(asy._log_tau_weights(j, "even"), asy.log_tau(2 * j, lower), atol=1e-10)


def test_tau_moment_domain():
    with pytest.raises(DomainError):
        asy.tau_moment_sum(3, 4)
    with pytest.raises(DomainError):
        asy.tau_sum_exact(2, 4, "both")


# -- conjecture probe ---------------------------------------------------------------

def test_geometric_grid():
    g = asy.geometric_grid(10, 10_000)
    assert g[0] == 10 and g[-1] == 10_000 and np.all(np.diff(g) > 0)


def test_probe_k1_exact_ratio():
    p = asy.conjecture_probe(1, j_max=1000)
    assert np.allclose(p.even_ratios, 2.0, rtol=1e-12)
    assert np.allclose(np.array(p.odd_ratios) * p.j_grid, 2 * np.array(p.j_grid) - 1, rtol=1e-12)


def test_probe_k2_tends_to_twelve():
    p = asy.conjecture_probe(2, j_max=10_000)
    j = np.array(p.j_grid, dtype=float)
    assert np.allclose(p.even_ratios, 12 - 4 / j, rtol=1e-11)
    assert p.stabilization["last_decade_drift"] < 2e-3


@pytest.mark.parametrize("k", [3, 6, 10])
def test_probe_stabilizes(k):
    p = asy.conjecture_probe(k, j_max=10_000)
    assert p.stabilization["last_decade_drift"] < 0.02
    assert p.stabilization["even_odd_relative_gap"] < 0.01
    assert p.target is None


def test_probe_serialization():
    p = asy.conjecture_probe(3, j_max=200)
    data = json.loads(p.to_json())
    assert data["j_grid"] == p.j_grid
    rows = list(csv.reader(io.StringIO(p.to_csv())))
    assert rows[0] == ["j", "even_value", "even_ratio", "odd_value", "odd_ratio"]
    assert len(rows) == len(p.j_grid) + 1
    assert float(rows[1][2]) == p.even_ratios[0]


def test_probe_domain():
    with pytest.raises(DomainError):
        asy.conjecture_probe(0)
    with pytest.raises(DomainError):
        asy.conjecture_probe(2, j_max=5)
