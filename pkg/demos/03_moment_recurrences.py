"""Moments of the finite operator three ways: direct summation and two
recurrences that step down in degree while transforming alpha and x."""
from fractions import Fraction

from qstancu import (
    QParams,
    apply,
    moment_closed_form,
    moment_recurrence_binomial,
    moment_recurrence_videnskii,
    monomial,
)

params = QParams(Fraction(1, 2), Fraction(1, 4))
n, x = 4, Fraction(1, 2)
print(f"{'m':>2} {'direct':>22} {'binomial rec.':>22} {'difference rec.':>22}")
for m in range(1, 6):
    direct = apply(params, n, monomial(m), x)
    rec1 = moment_recurrence_binomial(params, n, m - 1, x)
    rec2 = moment_recurrence_videnskii(params, n, m - 1, x)
    print(f"{m:>2} {str(direct):>22} {str(rec1):>22} {str(rec2):>22}")
print("closed form for m = 2:", moment_closed_form(params, n, 2, x))
