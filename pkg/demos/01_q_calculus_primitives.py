"""q-integers, Pochhammer symbols and Gaussian binomials, exact and float.

Run: python3 demos/01_q_calculus_primitives.py
"""
from fractions import Fraction

from qstancu import q_binomial, q_integer, q_pochhammer, q_pochhammer_infinite, verify_product_identity
from qstancu.qcore import q_binomial_theorem_series

q = Fraction(1, 2)
print("[n]_q for n = 0..5 at q = 1/2:", [str(q_integer(n, q)) for n in range(6)])
print("Gaussian binomial row n = 4:", [str(q_binomial(4, k, q)) for k in range(5)])
print("(1/2; 1/2)_2 =", q_pochhammer(q, q, 2))

# Infinite products are float-only and carry a certificate.
value, cert = q_pochhammer_infinite(0.5, 0.5, tail_tol=1e-12)
print(f"(1/2; 1/2)_oo ~ {value:.15f}  using {cert.n_terms} factors, error <= {cert.tail_bound:.2e}")

# The finite product identity holds with exact equality.
print("product identity at a=1/3, b=1/2, n=5:", verify_product_identity(Fraction(1, 3), q, q, 5))

# The q-binomial theorem: series on the left, ratio of infinite products on the right.
a, x = 0.5, 1 / 3
series, scert = q_binomial_theorem_series(a, x, 0.5, 1e-13)
num, _ = q_pochhammer_infinite(a * x, 0.5, 1e-14)
den, _ = q_pochhammer_infinite(x, 0.5, 1e-14)
print(f"series {series:.15f}  products {num / den:.15f}  series bound {scert.tail_bound:.1e}")
