"""The limit operator as a certified series, checked against the finite
moment formula and both limit recurrences."""
from fractions import Fraction

from qstancu import (
    QParams,
    builtin,
    limit_apply,
    limit_moment_general,
    limit_recurrence,
    limit_recurrence_binomial,
    monomial,
)

fp = QParams(0.5, 0.25)
xp = QParams(Fraction(1, 2), Fraction(1, 4))
x = 0.5
for m in range(7):
    s = limit_apply(fp, monomial(m), x, tail_tol=1e-10)
    exact = limit_moment_general(xp, m, Fraction(1, 2))
    print(f"e{m}: series {s.value:.12f} +- {s.tail_bound:.1e} ({s.terms_used} terms)  formula {float(exact):.12f}")

print("recurrences for e4:", limit_recurrence(xp, 3, Fraction(1, 2)), limit_recurrence_binomial(xp, 3, Fraction(1, 2)))

# Approaching x = 1 the value tends to f(1); past 1 - 2^-20 the endpoint clause is used.
f = builtin("exp")
for j in (2, 6, 12, 20, 22):
    s = limit_apply(fp, f, 1 - 2.0**-j)
    print(f"x = 1 - 2^-{j:<2}  S(exp) = {s.value:.10f}  switched: {s.endpoint_switch}")
