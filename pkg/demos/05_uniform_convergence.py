"""Sup-error of the degree-n operator against the limit operator.

For e2 the error is known in closed form, which makes a good sanity check
for the whole pipeline.
"""
from concurrent.futures import ThreadPoolExecutor

from qstancu import QParams, builtin, convergence_experiment, monomial, polynomial
from qstancu.limitop import e2_gap

params = QParams(0.5, 0.25)
grid = [j / 32 for j in range(33)]
with ThreadPoolExecutor() as pool:
    tables = {
        name: convergence_experiment(params, f, 40, grid, map_fn=pool.map)
        for name, f in (("e2", monomial(2)), ("1 - t^2", polynomial([1.0, 0.0, -1.0])), ("exp", builtin("exp")))
    }

print(f"{'n':>3} " + " ".join(f"{name:>12}" for name in tables) + f" {'e2 analytic':>12}")
for i, n in enumerate(tables["e2"].n):
    if n in (1, 2, 4, 8, 16, 24, 32, 40):
        gap = max(float(e2_gap(params, n, x)) for x in grid)
        print(f"{n:>3} " + " ".join(f"{t.sup_error[i]:12.3e}" for t in tables.values()) + f" {gap:12.3e}")
print("decreasing from n = 4:", {name: t.decreasing_from(4) for name, t in tables.items()})
