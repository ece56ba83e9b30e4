"""The finite basis in product form and in q-Pochhammer form.

The two agree exactly at rational points.  At alpha = 0, x = 0 the
Pochhammer form is 0/0 and only the product form applies.
"""
from fractions import Fraction

from qstancu import QParams, basis, basis_pochhammer_form, basis_product_form
from qstancu.stancu import DegeneratePoint

params = QParams(Fraction(1, 2), Fraction(1, 4))
x = Fraction(1, 3)
prod = basis_product_form(params, 4, x)
poch = basis_pochhammer_form(params, 4, x)
print("product form   :", [str(v) for v in prod])
print("Pochhammer form:", [str(v) for v in poch])
print("identical:", prod.values == poch.values, " sum:", prod.total())

bernstein = QParams(Fraction(1, 2), Fraction(0))
try:
    basis_pochhammer_form(bernstein, 3, Fraction(0))
except DegeneratePoint as exc:
    print("degenerate point:", exc)
print("auto routing at x = 0:", [str(v) for v in basis(bernstein, 3, Fraction(0))])
