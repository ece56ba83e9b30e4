"""The limit q-Stancu operator.

As n -> oo the finite basis converges to

    p_{oo,k}(x) = (u;q)_k r^k / (q;q)_k * (r;q)_oo / (c;q)_oo,
    u = g/(x+g),  r = (x+g)/(1+g),  c = g/(1+g),  g = alpha/(1-q),

and the operator becomes the series ``sum_k f(1 - q^k) p_{oo,k}(x)`` on
[0, 1) with the value ``f(1)`` at x = 1.  Series evaluations are float-only
and carry a certified bound on the truncation and rounding error.  The
moments are finite sums and work in both backends.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable, Sequence

import numpy as np

from .numerics import require_float
from .qcore import (
    InvalidDomain,
    QParams,
    TruncationCertificate,
    q_pochhammer,
    q_integer,
    q_pochhammer_infinite,
    ratio_with_bound,
)
from .stancu import SampledFunction, UnsupportedOrder, apply

EPS = sys.float_info.epsilon

#: Points closer to 1 than this are evaluated with the x = 1 clause.
DELTA_SWITCH = 2.0**-20


@dataclass(frozen=True)
class LimitBasisValue:
    k: int
    value: float
    certificate: TruncationCertificate


@dataclass(frozen=True)
class SeriesEvaluation:
    """Truncated series value.  ``endpoint_switch`` marks points evaluated
    with the x = 1 clause; their ``tail_bound`` is infinite because no
    modulus of continuity is known for ``f``."""

    value: float
    terms_used: int
    tail_bound: float
    endpoint_switch: bool = False


def _float_params(params: QParams, what: str) -> QParams:
    require_float(params.q, params.alpha, what=what)
    return params


def _float_point(x) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise InvalidDomain(f"x must lie in [0, 1], got {x!r}")
    return x


@dataclass(frozen=True)
class _Prefactor:
    # (r;q)_oo / (c;q)_oo with its error bound; never exceeds 1 since r >= c
    value: float
    bound: float
    n_terms: int


def _prefactor(q: float, r: float, c: float, tail_tol: float) -> _Prefactor:
    a, a_cert = q_pochhammer_infinite(r, q, tail_tol)
    b, b_cert = q_pochhammer_infinite(c, q, tail_tol)
    value, bound = ratio_with_bound(a, a_cert.tail_bound, b, b_cert.tail_bound)
    return _Prefactor(value, bound + 2 * EPS * value, max(a_cert.n_terms, b_cert.n_terms))


def _geometry(params: QParams, x: float):
    g = params.alpha / (1 - params.q)
    u = g / (x + g)
    r = (x + g) / (1 + g)
    c = g / (1 + g)
    one_minus_r = (1 - x) / (1 + g)
    return u, r, c, one_minus_r


def _qq_lower(q: float) -> float:
    # rigorous lower bound for (q;q)_oo
    value, cert = q_pochhammer_infinite(q, q, 1e-15)
    return value - cert.tail_bound


def limit_basis(params: QParams, k: int, x, tail_tol: float = 1e-12) -> LimitBasisValue:
    """``p_{oo,k}(x)``; the two infinite products share ``tail_tol``."""
    params = _float_params(params, "limit basis")
    x = _float_point(x)
    if k < 0:
        raise IndexError("basis index must be nonnegative")
    if x == 1.0:
        return LimitBasisValue(k, 0.0, TruncationCertificate(0, 0.0))
    if x == 0.0:
        return LimitBasisValue(k, 1.0 if k == 0 else 0.0, TruncationCertificate(0, 0.0))
    q = params.q
    u, r, c, _ = _geometry(params, x)
    head = q_pochhammer(u, q, k) * r**k / q_pochhammer(q, q, k)
    pre = _prefactor(q, r, c, tail_tol / 2)
    value = head * pre.value
    bound = abs(head) * pre.bound + 4 * (k + 1) * EPS * abs(value)
    return LimitBasisValue(k, value, TruncationCertificate(pre.n_terms, bound))


def limit_basis_tail_bound(params: QParams, x, n_terms: int) -> float:
    """Upper bound on ``sum_{k >= n_terms} p_{oo,k}(x)`` for x in [0, 1).

    Each term is at most ``r^k / (q;q)_oo`` (the prefactor never exceeds 1),
    so the remainder is at most ``r^K / ((1-r)(q;q)_oo)``.
    """
    params = _float_params(params, "limit basis tail bound")
    x = _float_point(x)
    if x == 1.0:
        raise InvalidDomain("the limit basis has no tail at x = 1")
    if x == 0.0:
        return 0.0 if n_terms >= 1 else 1.0
    _, r, _, one_minus_r = _geometry(params, x)
    return r**n_terms / (one_minus_r * _qq_lower(params.q))


def _stationary_index(q: float) -> int:
    # beyond this index 1 - q^k, 1 - u q^k and 1 - q^(k+1) all round to 1.0
    k = 0
    while q**k >= EPS / 4:
        k += 1
    return k


def _series_terms_needed(sup: float, r: float, one_minus_r: float, qq_low: float, tol: float) -> int:
    """Smallest K with ``sup r^K / ((1-r) (q;q)_oo) <= tol``."""
    if sup == 0:
        return 0
    target = tol * one_minus_r * qq_low / sup
    if target >= 1:
        return 0
    log_r = math.log1p(-one_minus_r)
    k = max(0, math.ceil(math.log(target) / log_r))
    while k > 0 and sup * r ** (k - 1) / (one_minus_r * qq_low) <= tol:
        k -= 1
    while sup * r**k / (one_minus_r * qq_low) > tol:
        k += 1
    return k


def limit_apply(
    params: QParams,
    f: SampledFunction,
    x,
    tail_tol: float = 1e-10,
    sup_norm: float | None = None,
    delta_switch: float = DELTA_SWITCH,
) -> SeriesEvaluation:
    """Evaluate ``S_oo(f; x)`` with a certified error bound.

    The series is cut at the smallest K with
    ``||f|| r^K / ((1-r)(q;q)_oo) <= tail_tol/2``; the remaining half of the
    tolerance goes to the two infinite products.  ``||f||`` comes from
    :meth:`SampledFunction.sup_norm` unless given.

    Once ``q^k`` drops below machine precision every float factor of a term
    is stationary and the node rounds to 1.0, so the rest of the truncated
    sum is a geometric progression and is summed in closed form.
    """
    params = _float_params(params, "limit operator series")
    x = _float_point(x)
    if x == 1.0:
        return SeriesEvaluation(float(f(1.0)), 0, 0.0)
    if x == 0.0:
        return SeriesEvaluation(float(f(0.0)), 1, 0.0)
    if x > 1.0 - delta_switch:
        return SeriesEvaluation(float(f(1.0)), 0, math.inf, endpoint_switch=True)

    q = params.q
    u, r, c, one_minus_r = _geometry(params, x)
    sup = f.sup_norm() if sup_norm is None else float(sup_norm)
    n_terms = _series_terms_needed(sup, r, one_minus_r, _qq_lower(q), tail_tol / 2)
    # the prefactor is at most 1, so the discarded tail scales by at most 1
    series_tail = sup * r**n_terms / (one_minus_r * _qq_lower(q))

    dense = min(n_terms, _stationary_index(q))
    k = np.arange(dense + 1, dtype=float)
    qk = q**k
    ratios = (1.0 - u * qk[:-1]) / (1.0 - q * qk[:-1])
    coef = np.concatenate(([1.0], np.cumprod(ratios)))
    rk = np.power(r, k)
    weights = coef * rk
    vals = f.evaluate_many(1.0 - qk[:-1]) * weights[:-1]
    total = math.fsum(vals.tolist())
    abs_total = math.fsum(np.abs(vals).tolist())
    if n_terms > dense:
        # sum_{k=dense}^{n_terms-1} f(1) coef_dense r^k
        span = n_terms - dense
        geo = -math.expm1(span * math.log1p(-one_minus_r)) / one_minus_r
        extra = float(f(1.0)) * float(coef[-1]) * float(rk[-1]) * geo
        total += extra
        abs_total += abs(extra)
    rounding = (4 * dense + 16) * EPS * abs_total

    pre = _prefactor(q, r, c, tail_tol / 4)
    value = pre.value * total
    bound = (
        series_tail
        + (pre.value + pre.bound) * rounding
        + pre.bound * (abs_total + series_tail)
        + 2 * EPS * abs(value)
    )
    return SeriesEvaluation(value, n_terms, bound)


# --------------------------------------------------------------------------
# moments

def limit_moment_closed_form(params: QParams, m: int, x):
    x = params.scalar(x)
    if m == 0:
        return params.scalar(1)
    if m == 1:
        return x
    if m == 2:
        return x - params.q * x * (1 - x) / (1 + params.alpha)
    raise UnsupportedOrder(f"no closed form for limit moment order {m}")


def limit_moment_general(params: QParams, m: int, x):
    """``S_oo(e_m; x) = sum_s C(m,s) (-1)^s (r;q)_s / (c;q)_s``; a finite sum."""
    if m < 0:
        raise UnsupportedOrder("moment order must be nonnegative")
    x = params.scalar(x)
    if not 0 <= x <= 1:
        raise InvalidDomain(f"x must lie in [0, 1], got {x!r}")
    g = params.gamma
    r = (x + g) / (1 + g)
    c = g / (1 + g)
    q = params.q
    terms = (comb(m, s) * (-1) ** s * q_pochhammer(r, q, s) / q_pochhammer(c, q, s) for s in range(m + 1))
    if params.exact:
        return sum(terms, params.scalar(0))
    return math.fsum(terms)


@lru_cache(maxsize=65536)
def _limit_rec(params: QParams, j: int, x):
    if j == 0:
        return params.scalar(1)
    m = j - 1
    lower = params.shifted()
    return _limit_rec(params, m, x) - (1 - x) * _limit_rec(lower, m, params.q * x / (1 + params.alpha))


@lru_cache(maxsize=65536)
def _limit_rec_binomial(params: QParams, j: int, x):
    if j == 0:
        return params.scalar(1)
    m = j - 1
    q = params.q
    lower = params.shifted()
    x_up = (x + params.alpha) / (1 + params.alpha)
    acc = sum(comb(m, s) * q**s * (1 - q) ** (m - s) * _limit_rec_binomial(lower, s, x_up) for s in range(m + 1))
    return x * acc


def limit_recurrence(params: QParams, m: int, x):
    """``S_oo(e_{m+1}; x)`` from
    ``S_oo(e_{m+1}; x) = S_oo(e_m; x) - (1-x) S_oo^{q,a'}(e_m; q x/(1+a))``."""
    if m < 0:
        raise UnsupportedOrder("moment order must be nonnegative")
    return _limit_rec(params, m + 1, params.scalar(x))


def limit_recurrence_binomial(params: QParams, m: int, x):
    """``S_oo(e_{m+1}; x)`` from
    ``x sum_s C(m,s) q^s (1-q)^(m-s) S_oo^{q,a'}(e_s; (x+a)/(1+a))``."""
    if m < 0:
        raise UnsupportedOrder("moment order must be nonnegative")
    return _limit_rec_binomial(params, m + 1, params.scalar(x))


# --------------------------------------------------------------------------
# S_n -> S_oo

@dataclass
class ConvergenceTable:
    n: list = field(default_factory=list)
    sup_error: list = field(default_factory=list)
    tail_bound: float = 0.0
    grid: list = field(default_factory=list)

    def rows(self):
        return list(zip(self.n, self.sup_error))

    def decreasing_from(self, n0: int) -> bool:
        """Strictly decreasing sup-error for all n >= n0."""
        errs = [e for n, e in zip(self.n, self.sup_error) if n >= n0]
        return all(b < a for a, b in zip(errs, errs[1:]))


def convergence_experiment(
    params: QParams,
    f: SampledFunction,
    n_max: int,
    grid: Sequence,
    tail_tol: float = 1e-13,
    map_fn: Callable = map,
) -> ConvergenceTable:
    """``max_x |S_n(f; x) - S_oo(f; x)|`` over ``grid`` for n = 1..n_max.

    ``tail_bound`` is the largest certificate among the limit values; any
    entry of ``sup_error`` is accurate to within it.  ``map_fn`` may be an
    executor's ``map`` to spread the grid over workers.
    """
    params = _float_params(params, "convergence experiment")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    xs = [_float_point(x) for x in grid]

    def column(x):
        limit = limit_apply(params, f, x, tail_tol)
        errors = [abs(apply(params, n, f, x) - limit.value) for n in range(1, n_max + 1)]
        return errors, limit.tail_bound

    results = list(map_fn(column, xs))
    table = ConvergenceTable(grid=xs)
    table.tail_bound = max((tb for _, tb in results), default=0.0)
    for i, n in enumerate(range(1, n_max + 1)):
        table.n.append(n)
        table.sup_error.append(max(errs[i] for errs, _ in results))
    return table


def e2_gap(params: QParams, n: int, x):
    """``S_n(e_2; x) - S_oo(e_2; x) = x(1-x)/(1+a) (1/[n]_q - (1-q))``."""
    x = params.scalar(x)
    return x * (1 - x) / (1 + params.alpha) * (1 / q_integer(n, params.q) - (1 - params.q))
