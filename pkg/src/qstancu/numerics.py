"""Scalar backends and tolerance policy.

Two number roles share one arithmetic contract:

* exact   -- ``int`` and :class:`fractions.Fraction`; every finite identity is
  checked with ``==``.
* float   -- builtin ``float``; comparisons go through :class:`Tolerance`.

The kind of a computation is decided by its inputs.  Mixing the two roles is
refused instead of silently coercing, and operations that need infinite
products or transcendental functions refuse exact inputs.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Union

Scalar = Union[int, Fraction, float]

#: Largest degree accepted by finite-n evaluations in exact mode.  Rebind to
#: change it; big-integer growth makes very large degrees slow, not wrong.
EXACT_N_CAP = 64


class QStancuError(Exception):
    """Base class for every error raised by this package."""


class ZeroDenominator(QStancuError, ZeroDivisionError):
    pass


class ModeMismatch(QStancuError, TypeError):
    """Exact and float scalars were mixed, or a value has the wrong kind."""


class ExactModeUnsupported(QStancuError):
    """The operation needs infinite products or transcendental functions."""


class DegreeTooLarge(QStancuError, ValueError):
    pass


class ScalarKind(enum.Enum):
    EXACT = "exact"
    FLOAT = "float"

    @classmethod
    def parse(cls, value: "ScalarKind | str") -> "ScalarKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown scalar kind {value!r}; expected 'exact' or 'float'") from None


def rational_of(num: int, den: int = 1) -> Fraction:
    """Canonical rational ``num/den`` (positive denominator, reduced)."""
    if den == 0:
        raise ZeroDenominator(f"zero denominator in {num}/{den}")
    return Fraction(num, den)


def is_exact(value) -> bool:
    # bool is an int subclass; reject it so flags never pass as scalars
    return isinstance(value, _RationalABC) and not isinstance(value, bool)


def kind_of(*values) -> ScalarKind:
    """Common kind of ``values``; raises :class:`ModeMismatch` on a mix."""
    kinds = set()
    for v in values:
        if is_exact(v):
            kinds.add(ScalarKind.EXACT)
        elif isinstance(v, float):
            kinds.add(ScalarKind.FLOAT)
        else:
            raise ModeMismatch(f"unsupported scalar {v!r} of type {type(v).__name__}")
    if len(kinds) > 1:
        raise ModeMismatch(f"cannot mix exact and float scalars: {values!r}")
    return kinds.pop() if kinds else ScalarKind.EXACT


def coerce(value, kind: ScalarKind) -> Scalar:
    """Convert ``value`` into ``kind``.

    Floats are never turned into rationals here: a float carries rounding
    that an exact computation would then certify as if it were true.
    """
    if kind is ScalarKind.FLOAT:
        if isinstance(value, float):
            return value
        if is_exact(value):
            return float(value)
    elif is_exact(value):
        return Fraction(value)
    raise ModeMismatch(f"cannot use {value!r} as a {kind.value} scalar")


def require_float(*values, what: str = "this operation") -> None:
    if kind_of(*values) is ScalarKind.EXACT:
        raise ExactModeUnsupported(f"{what} needs float inputs (infinite products or transcendental functions)")


def check_exact_degree(n: int, kind: ScalarKind) -> None:
    if kind is ScalarKind.EXACT and n > EXACT_N_CAP:
        raise DegreeTooLarge(f"degree {n} exceeds the exact-mode cap {EXACT_N_CAP}")


@dataclass(frozen=True)
class Tolerance:
    """Mixed absolute/relative acceptance band.

    ``accept(x, y)`` holds iff ``|x - y| <= absolute + relative * max(|x|, |y|)``.
    """

    absolute: float = 1e-12
    relative: float = 1e-12

    def __post_init__(self):
        if self.absolute < 0 or self.relative < 0:
            raise ValueError("tolerance components must be nonnegative")
        if self.absolute == 0 and self.relative == 0:
            raise ValueError("at least one tolerance component must be positive")

    def accept(self, x, y) -> bool:
        x, y = float(x), float(y)
        if math.isnan(x) or math.isnan(y):
            return False
        if x == y:
            return True
        return abs(x - y) <= self.absolute + self.relative * max(abs(x), abs(y))


DEFAULT_TOLERANCE = Tolerance()


def approx_equal(x, y, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    return tol.accept(x, y)


def same(x, y, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Equality in the backend of the arguments: ``==`` when both are exact."""
    if is_exact(x) and is_exact(y):
        return x == y
    return tol.accept(x, y)
