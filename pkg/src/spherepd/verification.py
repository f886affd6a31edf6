"""Named verification suites, one per group of results, used by ``spherepd verify``.

Each suite returns a list of Check records; a suite passes when every check does.
The suites are deliberately smaller than the test-suite versions so they run in a
few seconds each.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import asymptotics as asy
from . import model, operators as op, schoenberg as sb
from .model import IsotropicFunction, even_derivative_at_zero
from .schoenberg import INF, SchoenbergSequence


@dataclass
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def _le(name, value, tol, detail=""):
    value = float(value)
    return Check(name, value, tol, bool(value <= tol), detail)


def _grid(n=400):
    return np.linspace(0.0, math.pi, n)


def half_cosine() -> IsotropicFunction:
    """(1 + cos theta) / 2, the montee of the constant function."""
    return IsotropicFunction(evaluator=lambda t: 0.5 * (1.0 + np.cos(t)),
                             derivative_evaluator=lambda t: -0.5 * np.sin(t),
                             second_derivative_at_zero=-0.5, label="(1+cos)/2")


def _sup(f, g, grid=None):
    th = _grid() if grid is None else grid
    return float(np.max(np.abs(np.asarray(f(th)) - np.asarray(g(th)))))


# -- suites -------------------------------------------------------------------

def suite_lemma21() -> list:
    out = []
    for tau, delta in ((1.0, 0.5), (2.0, 0.3)):
        psi = model.make_multiquadric(tau, delta)
        seq = sb.multiquadric_sequence(tau, delta)
        fd2 = even_derivative_at_zero(psi, 2)
        fd4 = even_derivative_at_zero(psi, 4)
        s2 = sb.second_derivative_at_zero_from_sequence(seq)
        s4 = sb.fourth_derivative_at_zero_from_sequence(seq)
        out.append(_le(f"psi''(0) inf-sequence, MQ({tau:g},{delta:g})", abs(s2 - fd2) / abs(s2), 1e-4))
        out.append(_le(f"psi''''(0) inf-sequence, MQ({tau:g},{delta:g})", abs(s4 - fd4) / abs(s4), 1e-4))
    for d in (2, 3, 5):
        seq = sb.multiquadric_sequence(0.5 * (d - 1), 0.4, d)
        psi = sb.function_from_sequence(seq)
        fd2 = even_derivative_at_zero(psi, 2)
        s2 = sb.second_derivative_at_zero_from_sequence(seq)
        out.append(_le(f"psi''(0) {d}-sequence, MQ", abs(s2 - fd2) / abs(s2), 1e-4))
    for d in (1, 3, 7):
        w = SchoenbergSequence.from_values(d, [0.5, 0.5])
        out.append(_le(f"witness b0=b1=1/2, d={d}: -psi''(0) = 1/2",
                       abs(-sb.second_derivative_at_zero_from_sequence(w) - 0.5), 0.0))
    out.append(_le("corner bound d=1, c=pi", abs(sb.corner_bound(1, math.pi) - 1.0), 0.0))
    out.append(_le("corner bound d=3, c=pi", abs(sb.corner_bound(3, math.pi) - 4.0 / 3.0), 0.0))
    return out


def suite_prop33() -> list:
    out = []
    th = _grid()
    for d in range(3, 9):
        g = np.linspace(0.0, math.pi, 202)[1:-1]
        worst = max(abs(a - b) for a, b in (op.f_d(d, float(t)) for t in g))
        out.append(_le(f"f_d dual forms d={d}", worst, 1e-10))
    cond = op.montee_condition(model.make_cosine(), 3)
    out.append(_le("c(3) for cos theta equals -1/4", abs(cond["series"] + 0.25), 1e-8))
    out.append(_le("int f_3 cos equals -1/4", abs(cond["integral"] + 0.25), 1e-8))
    rej = op.montee_sequence(SchoenbergSequence.unit(3, 1))
    out.append(Check("montee of cos theta in d=3 rejected", float(not rej.admitted), 1.0,
                     not rej.admitted and rej.reason == "negative-c"))
    for name, psi in (("MQ(1,0.5)", model.make_multiquadric(1, 0.5)),
                      ("Wendland C2(4,2.5)", model.make_wendland("C2", 4, 2.5))):
        for d in (3, 4, 5):
            cond = op.montee_condition(psi, d, 64)
            out.append(_le(f"c({d}) series vs integral, {name}",
                           abs(cond["series"] - cond["integral"]), 1e-8))
            rep = op.montee_sequence(sb.analyze(psi, d, 128))
            num = op.montee_numeric(psi).result_function
            out.append(_le(f"montee sequence vs function, {name}, d={d}",
                           _sup(lambda t: sb.synthesize(rep.result_sequence, t), num, th), 1e-7))
    return out


def suite_prop34() -> list:
    out = []
    th = _grid()
    for tau in (1, 2, 3):
        for delta in (0.2, 0.5, 0.8):
            rep = op.descente_numeric(model.make_multiquadric(tau, delta))
            out.append(_le(f"descente MQ({tau},{delta}) = MQ({tau + 1},{delta})",
                           _sup(rep.result_function, model.make_multiquadric(tau + 1, delta), th), 1e-10))
    psi = model.make_multiquadric(2, 0.5)
    for d in (3, 4, 5):
        rep = op.descente_sequence(sb.analyze(psi, d, 96))
        num = op.descente_numeric(psi).result_function
        out.append(_le(f"descente sequence vs function, MQ(2,0.5), d={d}",
                       _sup(lambda t: sb.synthesize(rep.result_sequence, t), num, th), 1e-7))
    base = SchoenbergSequence.from_values(3, [0.3, 0.0, 0.2, 0.1, 0.0, 0.4])
    res = op.descente_sequence(base).result_sequence.coefficients
    same = np.array_equal(res > 0, base.coefficients[1:] > 0)
    out.append(Check("descente keeps strictly positive index set (shifted)", float(same), 1.0, bool(same)))
    w = op.descente_sequence(SchoenbergSequence.from_values(1, [0.5, 0.5])).result_sequence
    out.append(_le("D_S((1+cos)/2) = cos in d=3", abs(w.coefficients[0] - 1.0), 1e-15))
    return out


def suite_prop35() -> list:
    out = []
    th = _grid()
    seq = sb.multiquadric_sequence(2, 0.5)
    rep = op.montee_sequence(seq)
    num = op.montee_numeric(model.make_multiquadric(2, 0.5)).result_function
    out.append(_le("inf montee sequence vs function, MQ(2,0.5)",
                   _sup(lambda t: sb.synthesize(rep.result_sequence, t), num, th), 1e-8))
    for tau in (1, 2):
        d_seq = op.descente_sequence(sb.multiquadric_sequence(tau, 0.5)).result_sequence
        ref = sb.multiquadric_sequence(tau + 1, 0.5)
        n = min(d_seq.coefficients.size, ref.coefficients.size)
        out.append(_le(f"inf descente MQ({tau}) sequence = MQ({tau + 1}) sequence",
                       float(np.max(np.abs(d_seq.coefficients[:n] - ref.coefficients[:n]))), 1e-12))
    cond = op.montee_condition(model.make_constant(), INF)
    out.append(_le("psi = 1: upper-half integral equals 1", abs(cond["upper_half_integral"] - 1.0), 1e-12))
    cond = op.montee_condition(sb.multiquadric_sequence(1, 0.5), INF)
    out.append(Check("MQ(1,0.5): inf condition forms agree in sign", float(cond["signs_agree"]), 1.0,
                     bool(cond["signs_agree"] and cond["admissible"])))
    return out


def suite_lemma32() -> list:
    out = []
    th = _grid()
    for name, psi in (("(1+cos)/2", half_cosine()),
                      ("Wendland C2(4,pi/2)", model.make_wendland("C2", 4, math.pi / 2))):
        a = op.montee_numeric(op.descente_numeric(psi).result_function).result_function
        b = op.descente_numeric(op.montee_numeric(psi).result_function).result_function
        out.append(_le(f"I_S D_S psi = psi, {name}", _sup(a, psi, th), 1e-8))
        out.append(_le(f"D_S I_S psi = psi, {name}", _sup(b, psi, th), 1e-8))
    return out


def random_sequences(count, dims=(1, 2, 3), seed=11):
    rng = np.random.default_rng(seed)
    for i in range(count):
        b = rng.random(int(rng.integers(3, 13)))
        yield dims[i % len(dims)], SchoenbergSequence.from_values(dims[i % len(dims)], b / b.sum())


def suite_eq1011() -> list:
    worst_down = worst_up = 0.0
    g = np.linspace(0.0, math.pi, 50)
    for d, seq in random_sequences(20):
        worst_down = max(worst_down, float(np.max(np.abs(op.turning_bands_down(seq, g) - sb.synthesize(seq, g)))))
        up = sb.synthesize(op.shift(seq, -1), g, d + 2)
        worst_up = max(worst_up, float(np.max(np.abs(op.turning_bands_up(seq, g) - up))))
    return [_le("turning bands down (Eq. 10 form)", worst_down, 1e-8),
            _le("turning bands up (Eq. 11 form)", worst_up, 1e-8)]


def suite_prop51() -> list:
    out = []
    for name, psi in (("MQ(1,0.5)", model.make_multiquadric(1, 0.5)),
                      ("Wendland C2(4,2.5)", model.make_wendland("C2", 4, 2.5))):
        ref = sb.analyze(psi, 1, 64).coefficients
        for d in (2, 3, 4, 5):
            conv = sb.to_one_dim(sb.analyze(psi, d, 64)).coefficients
            out.append(_le(f"to_one_dim vs direct, {name}, d={d}", float(np.max(np.abs(conv - ref))), 1e-6))
    return out


def suite_lemma52(j_small=500, j_large=5000) -> list:
    out = []
    for d in range(2, 8):
        for l in range(5):
            c = asy.c_d_constant(d, l)
            for parity in asy.PARITIES:
                e1 = abs(asy.kappa_moment_sum(d, l, j_small, parity) / j_small ** l - c) / c
                e2 = abs(asy.kappa_moment_sum(d, l, j_large, parity) / j_large ** l - c) / c
                improved = e2 < e1 or e2 < ROUNDOFF_FLOOR
                out.append(Check(f"c_{d}({l}) {parity}: error at j={j_large}", e2, 0.05,
                                 bool(e2 < 0.05 and improved), f"error at j={j_small}: {e1:.3e}"))
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(500):
        d = int(rng.integers(2, 10))
        j = int(rng.integers(1, 5000))
        n = int(rng.integers(0, j + 1))
        n -= (j - n) % 2
        n = abs(n)
        direct = float(asy.kappa(d + 2, j, n))
        worst = max(worst, abs(float(asy.kappa_recursive(d, j, n)) - direct) / abs(direct))
    out.append(_le("kappa dimension recursion residual", worst, 1e-12))
    return out


# sums that equal their limit identically only show rounding noise, which need not shrink
ROUNDOFF_FLOOR = 1e-12


def suite_lemma54() -> list:
    out = []
    for parity in asy.PARITIES:
        for l in (0, 2, 4):
            bad = [j for j in range(1, asy.EXACT_J_MAX + 1)
                   if asy.tau_sum_exact(l, j, parity) != asy.tau_closed_form(l, j, parity)]
            out.append(Check(f"p_{l} {parity} exact for j <= 30", float(len(bad)), 0.0, not bad,
                             f"mismatches at j={bad}" if bad else ""))
            worst = max(asy.tau_moment_sum(l, j, parity).relative_error for j in range(1, 1001))
            out.append(_le(f"p_{l} {parity} float, j <= 1000", worst, 1e-12))
    return out


def suite_conjecture(j_max=10_000, ks=range(3, 16)) -> list:
    out = []
    for k in ks:
        probe = asy.conjecture_probe(k, j_max)
        st = probe.stabilization
        out.append(_le(f"k={k}: last-decade drift", st["last_decade_drift"], 0.02))
        out.append(_le(f"k={k}: even/odd agreement", st["even_odd_relative_gap"], 0.01))
    return out


WITNESS_CASES = ((1, 0, math.pi / 2), (3, 0, math.pi / 2), (1, 1, 1.0), (3, 1, 1.0))


def second_difference_stable(values, target=None, tol=1e-2) -> bool:
    """Second differences at zero settle: successive changes shrink and the last is near target."""
    diffs = np.abs(np.diff(values))
    shrinking = bool(np.all(diffs[1:] < diffs[:-1])) and diffs[-1] < 0.05 * abs(values[-1])
    if target is None:
        return shrinking
    return shrinking and abs(values[-1] - target) <= tol * abs(target) * 10


def suite_optimality() -> list:
    out = []
    for d, k, c in WITNESS_CASES:
        w = op.optimality_witness(d, k, c)
        ok = w.jump_detected_at_expected_order
        out.append(Check(f"witness d={d}, k={k}, c={c:.4g}: jump at order {w.expected_jump_order}",
                         float(w.probe.first_failing_order or -1), float(w.expected_jump_order), ok))
        if k >= 1:
            stable = second_difference_stable(w.second_difference_at_zero, w.predicted_second_derivative)
            out.append(Check(f"witness d={d}, k={k}: stable second difference at zero",
                             w.second_difference_at_zero[-1], float(w.predicted_second_derivative), stable))
    return out


SUITES: dict[str, Callable[[], list]] = {
    "lemma2.1": suite_lemma21,
    "prop3.3": suite_prop33,
    "prop3.4": suite_prop34,
    "prop3.5": suite_prop35,
    "lemma3.2": suite_lemma32,
    "eq10-11": suite_eq1011,
    "prop5.1": suite_prop51,
    "lemma5.2": suite_lemma52,
    "lemma5.4": suite_lemma54,
    "conjecture": suite_conjecture,
    "optimality": suite_optimality,
}


def run_suite(name: str) -> dict:
    checks = SUITES[name]()
    return {"suite": name, "passed": all(c.passed for c in checks),
            "checks": [c.to_dict() for c in checks]}
