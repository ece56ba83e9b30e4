"""Acceptance criteria, one test each.  The terminal summary prints a
PASS/FAIL line per criterion (see conftest.py)."""
import random
import time
from fractions import Fraction as F

import mpmath
import pytest

from qstancu.qcore import (
    QParams,
    q_binomial_theorem_series,
    q_integer,
    q_pochhammer_infinite,
    verify_product_identity,
)
from qstancu.stancu import (
    apply,
    basis,
    basis_pochhammer_form,
    basis_product_form,
    basis_recurrence_sides,
    builtin,
    moment_recurrence_binomial,
    moment_recurrence_videnskii,
    monomial,
    polynomial,
)
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

from oracles import qbernstein_apply, qbernstein_basis

QS = (F(1, 4), F(1, 2), F(3, 4))
ALPHAS = (F(0), F(1, 4), F(1), F(3))
SWEEP = [QParams(q, a) for q in QS for a in ALPHAS]
XS = [F(j, 8) for j in range(9)]
NS = range(1, 9)


def criterion(number, title):
    return pytest.mark.criterion(number, title)


@criterion(1, "exact finite moments e0, e1, e2 on the rational sweep (< 10 s)")
def test_exact_finite_moments():
    start = time.perf_counter()
    e0, e1, e2 = monomial(0), monomial(1), monomial(2)
    for p in SWEEP:
        for n in NS:
            qn = q_integer(n, p.q)
            for x in XS:
                assert apply(p, n, e0, x) == 1
                assert apply(p, n, e1, x) == x
                assert apply(p, n, e2, x) == (x * (x + p.alpha) + x * (1 - x) / qn) / (1 + p.alpha)
    assert time.perf_counter() - start < 10


@criterion(2, "product and Pochhammer bases agree exactly; product form gives delta at the degenerate point")
def test_representation_equivalence():
    for p in SWEEP:
        for n in NS:
            for x in XS:
                prod = basis_product_form(p, n, x)
                if p.alpha == 0 and x == 0:
                    assert tuple(prod) == (1,) + (0,) * n
                    continue
                assert basis_pochhammer_form(p, n, x).values == prod.values


@criterion(3, "both finite moment recurrences and the basis recurrence hold exactly")
def test_recurrence_consistency():
    for p in SWEEP:
        for n in NS:
            for x in XS:
                for m in range(5):
                    direct = apply(p, n, monomial(m + 1), x)
                    assert moment_recurrence_binomial(p, n, m, x) == direct
                    assert moment_recurrence_videnskii(p, n, m, x) == direct
                for k in range(n + 1):
                    lhs, rhs = basis_recurrence_sides(p, n, k, x)
                    assert lhs == rhs


@criterion(4, "alpha = 0 reproduces an independent q-Bernstein evaluator exactly")
def test_alpha_zero_reduction():
    funcs = [monomial(m) for m in range(6)] + [polynomial([F(1), F(-3, 2), F(0), F(2, 5)])]
    for q in QS:
        p = QParams(q, F(0))
        for n in NS:
            for x in XS:
                assert list(basis(p, n, x)) == qbernstein_basis(q, n, x)
                for f in funcs:
                    assert apply(p, n, f, x) == qbernstein_apply(q, n, f, x)
                for m in range(5):
                    want = qbernstein_apply(q, n, monomial(m + 1), x)
                    assert moment_recurrence_binomial(p, n, m, x) == want
                    assert moment_recurrence_videnskii(p, n, m, x) == want


@criterion(5, "limit moments: exact closed forms, and certified series within tail_bound for m <= 6 (< 30 s)")
def test_limit_moments():
    start = time.perf_counter()
    for p in SWEEP:
        for x in XS:
            assert limit_moment_general(p, 0, x) == 1
            assert limit_moment_general(p, 1, x) == x
            assert limit_moment_general(p, 2, x) == x - p.q * x * (1 - x) / (1 + p.alpha)
            for m in range(3):
                assert limit_moment_general(p, m, x) == limit_moment_closed_form(p, m, x)
    for p in SWEEP:
        pf = QParams(float(p.q), float(p.alpha))
        exact = QParams(F(pf.q), F(pf.alpha))
        for x in XS:
            for m in range(7):
                s = limit_apply(pf, monomial(m), float(x), tail_tol=1e-10)
                reference = limit_moment_general(exact, m, x)
                assert abs(F(s.value) - reference) <= s.tail_bound
                assert s.tail_bound <= 1e-10
    assert time.perf_counter() - start < 30


@criterion(6, "both limit recurrences equal the general limit moment exactly for m <= 5")
def test_limit_recurrences():
    for p in SWEEP:
        for x in XS:
            for m in range(6):
                want = limit_moment_general(p, m + 1, x)
                assert limit_recurrence(p, m, x) == want
                assert limit_recurrence_binomial(p, m, x) == want


@criterion(7, "uniform convergence: sup-error decreasing from n = 4, e2 error matches the analytic gap")
def test_uniform_convergence():
    p = QParams(0.5, 0.25)
    grid = [j / 32 for j in range(33)]
    for name, f in (("e2", monomial(2)), ("poly", polynomial([1.0, 0.0, -1.0])), ("exp", builtin("exp"))):
        table = convergence_experiment(p, f, 40, grid)
        assert table.decreasing_from(4), name
        if name == "e2":
            assert table.sup_error[-1] < 1e-6
            for n, err in table.rows():
                gap = max(abs(float(e2_gap(p, n, x))) for x in grid)
                assert abs(err - gap) <= 1e-12


@criterion(8, "partition of unity, positivity and endpoint interpolation, finite and limit")
def test_partition_positivity_endpoints():
    f = polynomial([F(2), F(-1), F(3, 4)])
    ff = builtin("exp")
    for p in SWEEP:
        for n in NS:
            for x in XS:
                b = basis(p, n, x)
                assert b.total() == 1
                assert all(v >= 0 for v in b)
            assert apply(p, n, f, F(0)) == f(F(0))
            assert apply(p, n, f, F(1)) == f(F(1))
        pf = QParams(float(p.q), float(p.alpha))
        assert limit_apply(pf, ff, 1.0).value == ff(1.0)
        assert limit_apply(pf, ff, 0.0).value == ff(0.0)
        for x in XS[:-1]:
            x = float(x)
            partial, certs = 0.0, 0.0
            for k in range(50):
                lb = limit_basis(pf, k, x)
                assert lb.value >= 0
                partial += lb.value
                certs += lb.certificate.tail_bound
            slack = certs + 50 * 2.3e-16
            assert -slack <= 1 - partial <= limit_basis_tail_bound(pf, x, 50) + slack


@criterion(9, "product identity exact on 200 rational tuples; q-binomial theorem within certificates on 50 tuples")
def test_classical_identities():
    rng = random.Random(20240101)
    for _ in range(200):
        a = F(rng.randint(-12, 12), rng.randint(1, 12))
        b = F(rng.randint(-12, 12), rng.randint(1, 12))
        q = F(rng.randint(1, 11), 12)
        assert verify_product_identity(a, b, q, rng.randint(0, 10))
    for _ in range(50):
        a, x, q = rng.random(), rng.uniform(0.0, 0.9), rng.uniform(0.05, 0.9)
        lhs, cert = q_binomial_theorem_series(a, x, q, 1e-12)
        num, cn = q_pochhammer_infinite(a * x, q, 1e-13)
        den, cd = q_pochhammer_infinite(x, q, 1e-13)
        # true num in [num - cn, num], true den in [den - cd, den]
        lo, hi = (num - cn.tail_bound) / den, num / (den - cd.tail_bound)
        assert lo - cert.tail_bound <= lhs <= hi + cert.tail_bound
    for _ in range(50):
        # negative x: the right side via a high-precision oracle
        a, x, q = rng.random(), rng.uniform(-0.9, 0.0), rng.uniform(0.05, 0.9)
        lhs, cert = q_binomial_theorem_series(a, x, q, 1e-12)
        with mpmath.workdps(40):
            truth = mpmath.qp(a * x, q) / mpmath.qp(x, q)
        assert abs(lhs - float(truth)) <= cert.tail_bound


@criterion(10, "infinite Pochhammer tail bound is sound against a 200-factor deeper truncation")
def test_tail_bound_soundness():
    rng = random.Random(424242)
    for _ in range(100):
        a, q = rng.random(), rng.uniform(0.05, 0.95)
        value, cert = q_pochhammer_infinite(a, q, 1e-12)
        with mpmath.workdps(60):
            deeper = mpmath.mpf(1)
            for j in range(cert.n_terms + 200):
                deeper *= 1 - mpmath.mpf(a) * mpmath.mpf(q) ** j
            assert abs(mpmath.mpf(value) - deeper) <= cert.tail_bound
