"""Finite-degree q-Stancu operators.

The basis can be evaluated two ways:

* product form     p_{n,k}(x) = [n k]_q prod_{i<k}(x + a[i]_q)
                                 prod_{s<n-k}(1 - q^s x + a[s]_q) / prod_{i<n}(1 + a[i]_q)
* Pochhammer form  p_{n,k}(x) = [n k]_q r^k (g/(x+g);q)_k (r;q)_{n-k} / (g/(1+g);q)_n,
                   g = a/(1-q),  r = (x+g)/(1+g)

The operator samples ``f`` at the nodes ``[k]_q/[n]_q``.  Moments of order
0..2 have closed forms; higher ones follow from two recurrences that move
to degree n-1 with the shifted shape parameter ``q*a/(1+a)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Sequence

import numpy as np

from .numerics import (
    DEFAULT_TOLERANCE,
    ExactModeUnsupported,
    QStancuError,
    Tolerance,
    check_exact_degree,
    is_exact,
    same,
)
from .qcore import InvalidDomain, QParams, q_binomial_row, q_integer

__all__ = [
    "SampledFunction",
    "monomial",
    "polynomial",
    "builtin",
    "from_callable",
    "parse_function",
    "Representation",
    "BasisVector",
    "DegeneratePoint",
    "UnsupportedOrder",
    "rising_product_x",
    "falling_product_x",
    "basis_product_form",
    "basis_pochhammer_form",
    "basis",
    "nodes",
    "apply",
    "moment_closed_form",
    "moment_recurrence_binomial",
    "moment_recurrence_videnskii",
    "basis_recurrence_sides",
    "basis_recurrence_check",
]


class DegeneratePoint(QStancuError, ValueError):
    """The Pochhammer form is 0/0 here (alpha = 0 and x = 0)."""


class UnsupportedOrder(QStancuError, ValueError):
    pass


class FunctionSpecError(QStancuError, ValueError):
    pass


# --------------------------------------------------------------------------
# test functions

@dataclass(frozen=True, eq=False)
class SampledFunction:
    """A function on [0, 1] that the operators sample.

    ``kind`` is ``"monomial"``, ``"polynomial"``, ``"builtin"`` or
    ``"callable"``.  Monomials and polynomials evaluate exactly on
    rationals; the others are float-only.
    """

    kind: str
    name: str
    coeffs: tuple = ()
    fn: Callable | None = None
    sup_bound: float | None = None

    @property
    def exact(self) -> bool:
        return self.kind in ("monomial", "polynomial")

    def __call__(self, t):
        if self.exact:
            return _horner(self.coeffs, t)
        if is_exact(t):
            raise ExactModeUnsupported(f"{self.name} cannot be evaluated exactly")
        return float(self.fn(float(t)))

    def evaluate_many(self, ts) -> np.ndarray:
        """Vectorised float evaluation."""
        ts = np.asarray(ts, dtype=float)
        if self.exact:
            return _horner([float(c) for c in self.coeffs], ts)
        try:
            out = np.asarray(self.fn(ts), dtype=float)
            if out.shape == ts.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([float(self.fn(float(t))) for t in ts.ravel()]).reshape(ts.shape)

    def sup_norm(self, samples: int = 1025, inflation: float = 2.0) -> float:
        """Upper estimate of max |f| on [0, 1].

        Known bounds are used when available (rigorous for monomials and
        polynomials).  Otherwise ``f`` is sampled on ``samples`` equispaced
        points and the maximum is multiplied by ``inflation``.
        """
        if self.sup_bound is not None:
            return self.sup_bound
        if self.exact:
            return float(sum(abs(c) for c in self.coeffs))
        sampled = np.max(np.abs(self.evaluate_many(np.linspace(0.0, 1.0, samples))))
        return float(inflation * sampled)

    def __repr__(self):
        return f"SampledFunction({self.name!r})"


def _horner(coeffs, t):
    acc = 0 * t
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def monomial(m: int) -> SampledFunction:
    """``e_m(t) = t^m``."""
    if m < 0:
        raise ValueError("monomial degree must be nonnegative")
    return SampledFunction("monomial", f"e{m}", coeffs=(0,) * m + (1,), sup_bound=1.0)


def polynomial(coeffs: Sequence) -> SampledFunction:
    """Polynomial with ascending coefficients ``c0 + c1 t + ...``."""
    coeffs = tuple(coeffs)
    if not coeffs:
        raise ValueError("polynomial needs at least one coefficient")
    if any(not (is_exact(c) or isinstance(c, float)) for c in coeffs):
        raise TypeError(f"polynomial coefficients must be int, Fraction or float: {coeffs!r}")
    kind = "polynomial" if all(is_exact(c) for c in coeffs) else "callable"
    name = "poly:" + ",".join(str(c) for c in coeffs)
    if kind == "callable":
        fc = [float(c) for c in coeffs]
        return SampledFunction(kind, name, fn=lambda t: _horner(fc, t), sup_bound=float(sum(map(abs, fc))))
    return SampledFunction(kind, name, coeffs=tuple(Fraction(c) for c in coeffs))


def builtin(name: str, shift: float | None = None) -> SampledFunction:
    """Float-only test functions: ``exp``, ``sin`` and ``absshift`` (``|t - c|``)."""
    if name == "exp":
        return SampledFunction("builtin", "exp", fn=np.exp, sup_bound=math.e)
    if name == "sin":
        return SampledFunction("builtin", "sin", fn=np.sin, sup_bound=math.sin(1.0))
    if name == "absshift":
        c = float(0.5 if shift is None else shift)
        return SampledFunction(
            "builtin", f"absshift:{c!r}", fn=lambda t: np.abs(t - c), sup_bound=max(abs(c), abs(1 - c))
        )
    raise FunctionSpecError(f"unknown builtin {name!r}")


def from_callable(fn: Callable, name: str = "f", sup_bound: float | None = None) -> SampledFunction:
    return SampledFunction("callable", name, fn=fn, sup_bound=sup_bound)


def parse_function(text: str) -> SampledFunction:
    """Parse ``eN``, ``poly:c0,c1,...``, ``exp``, ``sin`` or ``absshift:c``."""
    text = text.strip()
    if len(text) > 1 and text[0] == "e" and text[1:].isdigit():
        return monomial(int(text[1:]))
    head, _, tail = text.partition(":")
    if head == "poly":
        try:
            coeffs = [_parse_coeff(c) for c in tail.split(",")]
        except ValueError as exc:
            raise FunctionSpecError(f"bad polynomial {text!r}: {exc}") from None
        return polynomial(coeffs)
    if head in ("exp", "sin") and not tail:
        return builtin(head)
    if head in ("absshift", "abs"):
        try:
            return builtin("absshift", float(Fraction(tail)) if tail else None)
        except ValueError:
            raise FunctionSpecError(f"bad shift in {text!r}") from None
    raise FunctionSpecError(f"unrecognised function spec {text!r}")


def _parse_coeff(text: str):
    text = text.strip()
    # integer and p/q coefficients stay exact; decimals become exact too,
    # since they are written in base ten
    return Fraction(text)


# --------------------------------------------------------------------------
# basis

class Representation(enum.Enum):
    PRODUCT = "product"
    POCHHAMMER = "pochhammer"


@dataclass(frozen=True)
class BasisVector:
    n: int
    values: tuple
    representation: Representation

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def __iter__(self):
        return iter(self.values)

    def total(self):
        return _total(self.values)


def _total(values):
    values = list(values)
    if values and isinstance(values[0], float):
        return math.fsum(values)
    return sum(values, Fraction(0))


def _point(params: QParams, x):
    x = params.scalar(x)
    if not 0 <= x <= 1:
        raise InvalidDomain(f"x must lie in [0, 1], got {x!r}")
    return x


def _prefix_products(factors, one):
    out = [one]
    for f in factors:
        out.append(out[-1] * f)
    return out


def rising_product_x(params: QParams, x, k: int):
    """``prod_{i<k} (x + alpha [i]_q)``."""
    x = _point(params, x)
    one = params.scalar(1)
    return _prefix_products((x + params.alpha * q_integer(i, params.q) for i in range(k)), one)[-1]


def falling_product_x(params: QParams, x, j: int):
    """``prod_{i<j} (1 - q^i x + alpha [i]_q)``."""
    x = _point(params, x)
    one = params.scalar(1)
    q, a = params.q, params.alpha
    return _prefix_products((1 - q**i * x + a * q_integer(i, q) for i in range(j)), one)[-1]


def _check_degree(params: QParams, n: int, minimum: int = 1):
    if n < minimum:
        raise ValueError(f"degree must be >= {minimum}, got {n}")
    check_exact_degree(n, params.kind)


def _product_values(params: QParams, n: int, x) -> tuple:
    q, a = params.q, params.alpha
    one = params.scalar(1)
    qint = [q_integer(i, q) for i in range(n)]
    rising = _prefix_products((x + a * qint[i] for i in range(n)), one)
    falling = _prefix_products((1 - q**i * x + a * qint[i] for i in range(n)), one)
    denom = _prefix_products((1 + a * qint[i] for i in range(n)), one)[-1]
    binoms = q_binomial_row(n, q)
    return tuple(binoms[k] * rising[k] * falling[n - k] / denom for k in range(n + 1))


def _pochhammer_values(params: QParams, n: int, x) -> tuple:
    q, g = params.q, params.gamma
    if x + g == 0:
        raise DegeneratePoint("alpha = 0 and x = 0: gamma/(x+gamma) is 0/0; use the product form")
    one = params.scalar(1)
    u = g / (x + g)
    r = (x + g) / (1 + g)
    c = g / (1 + g)
    qpow = _prefix_products([q] * n, one)
    low = _prefix_products((1 - u * qpow[j] for j in range(n)), one)
    high = _prefix_products((1 - r * qpow[j] for j in range(n)), one)
    denom = _prefix_products((1 - c * qpow[j] for j in range(n)), one)[-1]
    rpow = _prefix_products([r] * n, one)
    binoms = q_binomial_row(n, q)
    return tuple(binoms[k] * rpow[k] * low[k] * high[n - k] / denom for k in range(n + 1))


def basis_product_form(params: QParams, n: int, x) -> BasisVector:
    """``p_{n,0..n}(x)`` from the product formula; defined for every x in [0, 1]."""
    _check_degree(params, n)
    x = _point(params, x)
    return BasisVector(n, _product_values(params, n, x), Representation.PRODUCT)


def basis_pochhammer_form(params: QParams, n: int, x) -> BasisVector:
    """``p_{n,0..n}(x)`` from the q-Pochhammer representation.

    Raises :class:`DegeneratePoint` when ``x + gamma == 0``.
    """
    _check_degree(params, n)
    x = _point(params, x)
    return BasisVector(n, _pochhammer_values(params, n, x), Representation.POCHHAMMER)


def basis(params: QParams, n: int, x, representation: str | Representation = "auto") -> BasisVector:
    """Basis in the requested representation; ``"auto"`` prefers the Pochhammer
    form and falls back to the product form at the degenerate point."""
    if representation == "auto":
        x = _point(params, x)
        rep = Representation.PRODUCT if x + params.gamma == 0 else Representation.POCHHAMMER
    else:
        rep = Representation(representation)
    if rep is Representation.PRODUCT:
        return basis_product_form(params, n, x)
    return basis_pochhammer_form(params, n, x)


def _basis_any_degree(params: QParams, n: int, x) -> tuple:
    # degree 0 is the single constant basis function 1 (all products empty)
    if n == 0:
        return (params.scalar(1),)
    return _product_values(params, n, x)


def nodes(params: QParams, n: int) -> list:
    """Sampling nodes ``[k]_q / [n]_q``, k = 0..n."""
    qn = q_integer(n, params.q)
    return [q_integer(k, params.q) / qn for k in range(n + 1)]


def apply(params: QParams, n: int, f: SampledFunction | Callable, x, representation="auto"):
    """``S_n(f; x) = sum_k f([k]_q/[n]_q) p_{n,k}(x)``."""
    values = basis(params, n, x, representation).values
    return _total(f(t) * p for t, p in zip(nodes(params, n), values))


# --------------------------------------------------------------------------
# moments

def moment_closed_form(params: QParams, n: int, m: int, x):
    """Moments of order 0, 1, 2 in closed form."""
    x = _point(params, x)
    if m == 0:
        return params.scalar(1)
    if m == 1:
        return x
    if m == 2:
        a = params.alpha
        return (x * (x + a) + x * (1 - x) / q_integer(n, params.q)) / (1 + a)
    raise UnsupportedOrder(f"no closed form for moment order {m}; use a recurrence")


def _shift_up(params: QParams, x):
    return (x + params.alpha) / (1 + params.alpha)


def _shift_down(params: QParams, x):
    return params.q * x / (1 + params.alpha)


@lru_cache(maxsize=65536)
def _moment_rec1(params: QParams, n: int, j: int, x):
    # S_n(e_j; x) unrolled through the binomial recurrence
    if j == 0 or n == 1:
        return apply(params, n, monomial(j), x)
    m = j - 1
    q = params.q
    qn, qn1 = q_integer(n, q), q_integer(n - 1, q)
    lower, x_up = params.shifted(), _shift_up(params, x)
    acc = sum(
        comb(m, s) * q**s * qn1**s * _moment_rec1(lower, n - 1, s, x_up) for s in range(m + 1)
    )
    return x * acc / qn**m


@lru_cache(maxsize=65536)
def _moment_rec2(params: QParams, n: int, j: int, x):
    # S_n(e_j; x) unrolled through the basis-difference recurrence
    if j == 0 or n == 1:
        return apply(params, n, monomial(j), x)
    m = j - 1
    q = params.q
    ratio = q_integer(n - 1, q) / q_integer(n, q)
    tail = _moment_rec2(params.shifted(), n - 1, m, _shift_down(params, x))
    return _moment_rec2(params, n, m, x) - (1 - x) * ratio**m * tail


def moment_recurrence_binomial(params: QParams, n: int, m: int, x):
    """``S_n(e_{m+1}; x)`` from

        S_n(e_{m+1}; x) = x/[n]^m sum_s C(m,s) q^s [n-1]^s S_{n-1}^{q,a'}(e_s; (x+a)/(1+a))

    with ``a' = q a / (1 + a)``, recursing down to degree 1 or order 0,
    where the sum is taken directly.
    """
    _check_degree(params, n)
    if m < 0:
        raise UnsupportedOrder("moment order must be nonnegative")
    return _moment_rec1(params, n, m + 1, _point(params, x))


def moment_recurrence_videnskii(params: QParams, n: int, m: int, x):
    """``S_n(e_{m+1}; x)`` from

        S_n(e_{m+1}; x) = S_n(e_m; x) - (1-x) ([n-1]/[n])^m S_{n-1}^{q,a'}(e_m; q x/(1+a)).
    """
    _check_degree(params, n)
    if m < 0:
        raise UnsupportedOrder("moment order must be nonnegative")
    return _moment_rec2(params, n, m + 1, _point(params, x))


def basis_recurrence_sides(params: QParams, n: int, k: int, x):
    """Both sides of ``[k]/[n] p_{n,k}(x) = p_{n,k}(x) - (1-x) p_{n-1,k}^{q,a'}(q x/(1+a))``.

    ``p_{n-1,n}`` is taken to be 0.
    """
    _check_degree(params, n)
    if not 0 <= k <= n:
        raise IndexError(f"basis index {k} outside 0..{n}")
    x = _point(params, x)
    q = params.q
    p = _product_values(params, n, x)[k]
    lower = _basis_any_degree(params.shifted(), n - 1, _shift_down(params, x))
    p_lower = lower[k] if k < n else params.scalar(0)
    lhs = q_integer(k, q) / q_integer(n, q) * p
    rhs = p - (1 - x) * p_lower
    return lhs, rhs


def basis_recurrence_check(params: QParams, n: int, k: int, x, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    lhs, rhs = basis_recurrence_sides(params, n, k, x)
    return same(lhs, rhs, tol)
