"""Independent cross-check with a Numerov shooting solver.

Run: python demos/04_oracle.py   (about 10 s)
"""

import math

import numpy as np

from heunwell import oracle, spectrum
from heunwell.potential import PhysicalParams

for v1, v0 in ((1.0, 0.0), (2.0, 0.0), (1.0, 3.0)):
    p = PhysicalParams(v1=v1, v0=v0)
    shot, drift = oracle.numerov_eigenvalues(p, n_max=5, return_drift=True)
    exact = [l.e_exact for l in spectrum.solve_levels_exact(p, 5)]
    rel = np.abs(np.subtract(shot, exact)) / np.abs(exact)
    print(f"V1={v1}, V0={v0}: max rel. difference {rel.max():.1e}, grid-doubling drift {drift.max():.1e}")

# the shooting code knows nothing about the x^(2/3) well; a harmonic check
v = lambda x: 91.0 / (72.0 * x**2) + x**2
shot = oracle.shooting_eigenvalues(v, 3, start_exponent=13 / 6, e_floor=1.0, e_ceiling=15.0)
print("\nharmonic well with the same barrier:", np.round(shot, 9))
print("expected sqrt(2)(2k + 8/3):         ", np.round([math.sqrt(2) * (2 * k + 8 / 3) for k in range(3)], 9))

print("\nplain series 1F1(0.5; 1.5; -2) =", oracle.kummer_series_reference(0.5, 1.5, -2).value.real)
