"""The potential and its closed-form solutions.

Run: python demos/02_potential_and_solutions.py
"""

import numpy as np

from heunwell import REFERENCE_PRESET as P
from heunwell import GeneralSolution, SolutionContext, fundamental_solution, ode_residual, potential_value
from heunwell import closedform as cf
from heunwell.potential import spectral_params, turning_points

x = np.array([0.3, 0.6, 1.0, 2.0, 4.0])
print("x   :", x)
print("V(x):", np.round(potential_value(P, x), 6))

E = 3.0
s = spectral_params(P, E)
print(f"\nat E = {E}: epsilon = {s.epsilon:.6f}, a = {s.a:.6f}")
print("classical turning points:", turning_points(P, E))

# two independent fundamental solutions; both satisfy the equation
grid = np.linspace(0.2, 5, 60)
for c1, c2, label in ((1, 0, "principal"), (0, 1, "mirror")):
    print(f"{label:9s} residual: {ode_residual(GeneralSolution(c1, c2, P, E), grid):.2e}")

ctx = SolutionContext(P, E)
print("psi_F(1) =", fundamental_solution(ctx, 1.0))
print("Wronskian at x = 1, 3:", cf.wronskian(ctx, 1.0), cf.wronskian(ctx, 3.0))

# choosing C2/C1 removes the x^(-7/6) branch at the origin
g = cf.matched_general_solution(P, E)
xs = np.array([1e-4, 1e-3, 1e-2])
print("\nmatched solution near the origin behaves like x^(13/6):")
vals = np.abs(cf.matched_solution(P, E, xs))
print("  log-slope:", np.polyfit(np.log(xs), np.log(vals), 1)[0])
print("  C2/C1 =", g.c2)
