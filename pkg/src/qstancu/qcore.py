"""q-calculus primitives.

q-integers, q-factorials, q-Pochhammer symbols (finite and truncated
infinite), Gaussian binomials, and the two classical identities

    (ab;q)_n = sum_k [n k]_q b^k (a;q)_k (b;q)_{n-k}
    sum_k (a;q)_k / (q;q)_k x^k = (ax;q)_inf / (x;q)_inf     (|x| < 1)

Everything finite works in both scalar backends.  Infinite products and
series are float-only and come with a :class:`TruncationCertificate`.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .numerics import (
    DEFAULT_TOLERANCE,
    QStancuError,
    ScalarKind,
    Tolerance,
    coerce,
    kind_of,
    require_float,
)

EPS = sys.float_info.epsilon


class InvalidQ(QStancuError, ValueError):
    pass


class InvalidDomain(QStancuError, ValueError):
    pass


class IndexOutOfRange(QStancuError, IndexError):
    pass


def check_q(q) -> None:
    kind_of(q)
    if not 0 < q < 1:
        raise InvalidQ(f"q must lie strictly between 0 and 1, got {q!r}")


@dataclass(frozen=True)
class QParams:
    """Validated ``(q, alpha)`` pair.

    ``kind`` defaults to the kind of the inputs.  Passing
    ``kind=ScalarKind.FLOAT`` with rational inputs converts them; the
    reverse is refused.
    """

    q: Fraction | float
    alpha: Fraction | float
    kind: ScalarKind = field(default=None)

    def __post_init__(self):
        kind = ScalarKind.parse(self.kind) if self.kind is not None else kind_of(self.q, self.alpha)
        q, alpha = coerce(self.q, kind), coerce(self.alpha, kind)
        check_q(q)
        if not alpha >= 0:
            raise InvalidDomain(f"alpha must be nonnegative, got {alpha!r}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "kind", kind)

    @property
    def gamma(self):
        return self.alpha / (1 - self.q)

    @property
    def exact(self) -> bool:
        return self.kind is ScalarKind.EXACT

    def scalar(self, value):
        """``value`` converted to this parameter set's backend."""
        return coerce(value, self.kind)

    def shifted(self) -> "QParams":
        """Parameters one recursion level down: alpha -> q*alpha/(1+alpha)."""
        return QParams(self.q, self.q * self.alpha / (1 + self.alpha), self.kind)


@dataclass(frozen=True)
class TruncationCertificate:
    n_terms: int
    tail_bound: float

    def __post_init__(self):
        if not self.tail_bound >= 0:
            raise ValueError(f"tail bound must be nonnegative, got {self.tail_bound!r}")


def q_integer(n: int, q):
    """``[n]_q = 1 + q + ... + q^(n-1)``; ``[0]_q = 0``."""
    check_q(q)
    if n < 0:
        raise IndexOutOfRange(f"q-integer needs n >= 0, got {n}")
    if isinstance(q, float):
        return (1 - q**n) / (1 - q)
    return _q_integer_exact(n, Fraction(q))


@lru_cache(maxsize=4096)
def _q_integer_exact(n: int, q: Fraction) -> Fraction:
    total, power = Fraction(0), Fraction(1)
    for _ in range(n):
        total += power
        power *= q
    return total


def q_factorial(n: int, q):
    check_q(q)
    if n < 0:
        raise IndexOutOfRange(f"q-factorial needs n >= 0, got {n}")
    result = coerce(1, kind_of(q))
    for j in range(1, n + 1):
        result *= q_integer(j, q)
    return result


def q_pochhammer(a, q, m: int):
    """Finite product ``(a;q)_m = prod_{j<m} (1 - a q^j)``."""
    check_q(q)
    kind = kind_of(a, q)
    if m < 0:
        raise IndexOutOfRange(f"Pochhammer length must be >= 0, got {m}")
    result = coerce(1, kind)
    power = coerce(1, kind)
    for _ in range(m):
        result *= 1 - a * power
        power *= q
    return result


def q_pochhammer_infinite(a: float, q: float, tail_tol: float = 1e-12):
    """Truncated ``(a;q)_inf`` for ``0 <= a <= 1``.

    N is the smallest index with ``q^N / (1-q) <= tail_tol``.  By the
    Bernoulli inequality ``0 <= (a;q)_N - (a;q)_inf <= (a;q)_N a q^N / (1-q)``;
    the reported bound is that quantity plus an allowance for the rounding
    of the N computed factors.

    Returns ``(value, TruncationCertificate)``.
    """
    require_float(a, q, what="infinite q-Pochhammer")
    check_q(q)
    if not tail_tol > 0:
        raise ValueError("tail_tol must be positive")
    if not 0 <= a <= 1:
        raise InvalidDomain(f"infinite Pochhammer argument must lie in [0, 1], got {a!r}")
    if a == 0:
        return 1.0, TruncationCertificate(0, 0.0)
    n_terms = truncation_index(q, tail_tol)
    value, nontrivial = 1.0, 0
    for j in range(n_terms):
        step = a * q**j
        if step == 0.0:
            break
        value *= 1.0 - step
        nontrivial += 1
    if value == 0.0:
        return 0.0, TruncationCertificate(n_terms, 0.0)
    truncation = value * a * q**n_terms / (1 - q)
    rounding = 3 * nontrivial * EPS * value
    return value, TruncationCertificate(n_terms, truncation + rounding)


def truncation_index(q: float, tail_tol: float) -> int:
    """Smallest N with ``q^N / (1-q) <= tail_tol``."""
    n = max(0, math.ceil(math.log(tail_tol * (1 - q)) / math.log(q)))
    while n > 0 and q ** (n - 1) / (1 - q) <= tail_tol:
        n -= 1
    while q**n / (1 - q) > tail_tol:
        n += 1
    return n


def q_binomial(n: int, k: int, q, route: str = "factorial"):
    """Gaussian binomial ``[n k]_q``.

    ``route="factorial"`` uses ``[n]_q! / ([k]_q! [n-k]_q!)``;
    ``route="pochhammer"`` uses ``(q;q)_n / ((q;q)_k (q;q)_{n-k})``.
    """
    check_q(q)
    if not 0 <= k <= n:
        raise IndexOutOfRange(f"q-binomial needs 0 <= k <= n, got n={n}, k={k}")
    if route == "factorial":
        return q_factorial(n, q) / (q_factorial(k, q) * q_factorial(n - k, q))
    if route == "pochhammer":
        return q_pochhammer(q, q, n) / (q_pochhammer(q, q, k) * q_pochhammer(q, q, n - k))
    raise ValueError(f"unknown route {route!r}")


def q_binomial_row(n: int, q) -> list:
    """``[[n 0]_q, ..., [n n]_q]`` via ``[n k+1] = [n k] [n-k]_q / [k+1]_q``."""
    check_q(q)
    row = [coerce(1, kind_of(q))]
    for k in range(n):
        row.append(row[-1] * q_integer(n - k, q) / q_integer(k + 1, q))
    return row


def product_identity_sides(a, b, q, n: int):
    """Both sides of ``(ab;q)_n = sum_k [n k]_q b^k (a;q)_k (b;q)_{n-k}``."""
    kind_of(a, b, q)
    lhs = q_pochhammer(a * b, q, n)
    binoms = q_binomial_row(n, q)
    rhs = sum(binoms[k] * b**k * q_pochhammer(a, q, k) * q_pochhammer(b, q, n - k) for k in range(n + 1))
    return lhs, rhs


def verify_product_identity(a, b, q, n: int, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Exact equality for rational inputs.  For floats the relative part of
    ``tol`` is scaled by the sum of absolute terms, the size that rounding
    in the alternating sum is proportional to."""
    lhs, rhs = product_identity_sides(a, b, q, n)
    if kind_of(a, b, q) is ScalarKind.EXACT:
        return lhs == rhs
    binoms = q_binomial_row(n, q)
    scale = sum(abs(binoms[k] * b**k * q_pochhammer(a, q, k) * q_pochhammer(b, q, n - k)) for k in range(n + 1))
    return abs(lhs - rhs) <= tol.absolute + tol.relative * max(abs(lhs), scale)


def q_binomial_theorem_series(a: float, x: float, q: float, tail_tol: float = 1e-12):
    """Truncated ``sum_k (a;q)_k / (q;q)_k x^k`` with a ratio-test tail bound.

    For ``k >= K`` the term ratio is at most
    ``rho = |x| (1 + |a| q^K) / (1 - q^(K+1))``, so once ``rho < 1`` the
    discarded tail is at most ``|t_K| / (1 - rho)``.
    """
    require_float(a, x, q, what="q-binomial theorem series")
    check_q(q)
    if not abs(x) < 1:
        raise InvalidDomain(f"series needs |x| < 1, got {x!r}")
    if not tail_tol > 0:
        raise ValueError("tail_tol must be positive")
    if x == 0:
        return 1.0, TruncationCertificate(1, 0.0)
    total, term, k = 0.0, 1.0, 0
    abs_sum = 0.0
    while True:
        rho = abs(x) * (1 + abs(a) * q**k) / (1 - q ** (k + 1))
        if rho < 1:
            bound = abs(term) / (1 - rho)
            if bound <= tail_tol:
                break
        total += term
        abs_sum += abs(term)
        term *= (1 - a * q**k) * x / (1 - q ** (k + 1))
        k += 1
    rounding = 4 * (k + 1) * EPS * abs_sum
    return total, TruncationCertificate(k, bound + rounding)


def ratio_with_bound(num: float, num_bound: float, den: float, den_bound: float) -> tuple[float, float]:
    """``num/den`` and a bound on its distance to the true ratio.

    Both inputs are truncated infinite products, so the true values lie in
    ``[num - num_bound, num]`` and ``[den - den_bound, den]``.
    """
    value = num / den
    if den - den_bound <= 0:
        return value, math.inf
    low = (num - num_bound) / den
    high = num / (den - den_bound)
    return value, max(value - low, high - value)
