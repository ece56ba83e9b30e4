import math
from fractions import Fraction as F

import mpmath
import pytest

from qstancu.numerics import ExactModeUnsupported
from qstancu.qcore import QParams, q_integer, q_pochhammer
from qstancu.stancu import UnsupportedOrder, builtin, moment_closed_form, monomial, polynomial
from qstancu.limitop import (
    convergence_experiment,
    e2_gap,
    limit_apply,
    limit_basis,
    limit_basis_tail_bound,
    limit_moment_closed_form,
    limit_moment_general,
    limit_recurrence,
    limit_recurrence_binomial,
)

from oracles import mp_limit_apply, mp_qpoch

HALF, QUARTER = F(1, 2), F(1, 4)
PF = QParams(0.5, 0.25)
PX = QParams(HALF, QUARTER)
XS = [F(j, 8) for j in range(9)]
EXACT_PARAMS = [QParams(q, a) for q in (F(1, 4), F(1, 2), F(3, 4)) for a in (F(0), F(1, 4), F(1), F(3))]
FLOAT_PARAMS = [QParams(q, a) for q in (0.25, 0.5, 0.75) for a in (0.0, 0.25, 1.0, 3.0)]


def test_limit_basis_endpoints():
    for k in range(5):
        assert limit_basis(PF, k, 1.0).value == 0.0
        assert limit_basis(PF, k, 0.0).value == (1.0 if k == 0 else 0.0)
        assert limit_basis(QParams(0.5, 0.0), k, 0.0).value == (1.0 if k == 0 else 0.0)


def test_limit_basis_alpha_zero_reduces():
    q = 0.5
    p = QParams(q, 0.0)
    for x in (0.1, 0.5, 0.9):
        inf = float(mp_qpoch(x, q))
        for k in range(8):
            b = limit_basis(p, k, x)
            want = x**k * inf / float(q_pochhammer(q, q, k))
            assert abs(b.value - want) <= b.certificate.tail_bound + 1e-16


def test_limit_basis_against_mpmath():
    for p in FLOAT_PARAMS:
        for x in (0.125, 0.5, 0.875):
            g = p.alpha / (1 - p.q)
            u, r, c = g / (x + g), (x + g) / (1 + g), g / (1 + g)
            for k in (0, 1, 5, 12):
                b = limit_basis(p, k, x)
                want = float(mp_qpoch(u, p.q, k) * r**k / mp_qpoch(p.q, p.q, k) * mp_qpoch(r, p.q) / mp_qpoch(c, p.q))
                assert b.value >= 0
                assert abs(b.value - want) <= b.certificate.tail_bound


def test_partition_of_unity_partial_sums():
    for p in FLOAT_PARAMS:
        for j in range(8):
            x = j / 8
            partial, prev, certs = 0.0, -1.0, 0.0
            for k in range(60):
                b = limit_basis(p, k, x)
                partial += b.value
                certs += b.certificate.tail_bound
                assert partial >= prev - 1e-15
                prev = partial
            gap = 1.0 - partial
            assert -certs - 1e-14 <= gap <= limit_basis_tail_bound(p, x, 60) + certs + 1e-14


def test_limit_apply_examples():
    for x in (0.0, 0.1, 0.5, 0.9):
        s0 = limit_apply(PF, monomial(0), x)
        s1 = limit_apply(PF, monomial(1), x)
        assert abs(s0.value - 1) <= s0.tail_bound + 1e-15
        assert abs(s1.value - x) <= s1.tail_bound + 1e-15
    f = builtin("exp")
    end = limit_apply(PF, f, 1.0)
    assert end.value == math.exp(1.0) and end.tail_bound == 0
    s2 = limit_apply(PF, monomial(2), 0.5)
    assert abs(s2.value - 0.4) <= s2.tail_bound
    assert s2.tail_bound <= 1e-10


def test_limit_apply_against_brute_force():
    for p in FLOAT_PARAMS[::3]:
        for fn, f in ((math.exp, builtin("exp")), (math.sin, builtin("sin"))):
            mfn = {math.exp: mpmath.exp, math.sin: mpmath.sin}[fn]
            for x in (0.3, 0.7):
                s = limit_apply(p, f, x, tail_tol=1e-12)
                want = float(mp_limit_apply(p.q, p.alpha, mfn, x))
                assert abs(s.value - want) <= s.tail_bound


def test_exact_mode_rejected_for_series():
    with pytest.raises(ExactModeUnsupported):
        limit_apply(PX, monomial(2), HALF)
    with pytest.raises(ExactModeUnsupported):
        limit_basis(PX, 1, HALF)


def test_endpoint_continuity():
    f = builtin("exp")
    errs = []
    for j in range(1, 21):
        x = 1 - 2.0**-j
        s = limit_apply(PF, f, x, tail_tol=1e-12)
        assert not s.endpoint_switch
        errs.append(abs(s.value - math.e))
    assert errs[-1] < 1e-5
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_endpoint_switch():
    s = limit_apply(PF, builtin("exp"), 1 - 2.0**-22)
    assert s.endpoint_switch and s.value == math.e and math.isinf(s.tail_bound)


def test_monotone_operator():
    f = polynomial([0.0, 0.0, 1.0])
    g = polynomial([0.1, 0.0, 1.0])
    h = builtin("absshift", 0.5)
    for x in (0.1, 0.4, 0.8):
        a, b = limit_apply(PF, f, x), limit_apply(PF, g, x)
        assert a.value <= b.value + a.tail_bound + b.tail_bound
        assert limit_apply(PF, h, x).value >= -limit_apply(PF, h, x).tail_bound


def test_limit_moment_examples():
    x = HALF
    assert limit_moment_closed_form(PX, 2, x) == F(2, 5)
    p0 = QParams(HALF, F(0))
    y = F(1, 3)
    assert limit_moment_closed_form(p0, 2, y) == y - HALF * y * (1 - y)
    for b in (F(0), F(1)):
        assert limit_moment_closed_form(PX, 2, b) == b
    with pytest.raises(UnsupportedOrder):
        limit_moment_closed_form(PX, 3, x)
    assert limit_moment_general(PX, 3, x) == pytest.approx(0.33636363636363636, abs=1e-15)


def test_general_moment_frozen_values():
    # independently: sum_s C(m,s) (-1)^s (r;q)_s/(c;q)_s at q=1/2, a=1/4, x=1/2 has r=2/3, c=1/3
    r, c, q = F(2, 3), F(1, 3), HALF
    for m in range(7):
        want = sum(math.comb(m, s) * (-1) ** s * q_pochhammer(r, q, s) / q_pochhammer(c, q, s) for s in range(m + 1))
        assert limit_moment_general(PX, m, HALF) == want
    frozen = {3: 0.33636363636363636, 4: 0.2932806324110672, 5: 0.26234126650407874, 6: 0.23895294539434955}
    for m, value in frozen.items():
        assert float(limit_moment_general(PX, m, HALF)) == pytest.approx(value, abs=1e-15)
        brute = float(mp_limit_apply(0.5, 0.25, lambda t, m=m: t**m, 0.5, terms=400))
        assert brute == pytest.approx(value, abs=1e-14)


@pytest.mark.parametrize("p", EXACT_PARAMS, ids=str)
def test_limit_moments_and_recurrences_exact(p):
    for x in XS:
        for m in range(3):
            assert limit_moment_general(p, m, x) == limit_moment_closed_form(p, m, x)
        for m in range(6):
            want = limit_moment_general(p, m + 1, x)
            assert limit_recurrence(p, m, x) == want
            assert limit_recurrence_binomial(p, m, x) == want


def test_series_matches_general_moments():
    for x in (0.125, 0.5, 0.875):
        for m in range(7):
            s = limit_apply(PF, monomial(m), x, tail_tol=1e-10)
            assert abs(s.value - limit_moment_general(PF, m, x)) <= s.tail_bound


def test_e2_gap_vanishes():
    for p in EXACT_PARAMS:
        for x in XS:
            for n in range(1, 65):
                gap = e2_gap(p, n, x)
                assert gap == moment_closed_form(p, n, 2, x) - limit_moment_closed_form(p, 2, x)
                assert gap >= 0
            assert e2_gap(p, 64, x) <= x * (1 - x) * p.q**64 / (1 - p.q**64)
    assert e2_gap(PX, 1, HALF) == F(1, 4) / F(5, 4) * (1 / q_integer(1, HALF) - HALF)


def test_convergence_experiment_small():
    grid = [j / 8 for j in range(9)]
    t1 = convergence_experiment(PF, monomial(1), 6, grid)
    assert max(t1.sup_error) <= t1.tail_bound + 1e-15
    t2 = convergence_experiment(PF, monomial(2), 10, grid)
    assert t2.decreasing_from(1)
    for n, err in t2.rows():
        best = max(float(e2_gap(PF, n, x)) for x in grid)
        assert abs(err - best) <= 1e-12 + t2.tail_bound
