"""From a potential to a field configuration and back.

A stationary Schrodinger problem with potential V maps onto a two-state
problem whose (complex) detuning solves a Riccati equation.

Run: python demos/06_detuning_inversion.py
"""

import numpy as np

from heunwell import REFERENCE_PRESET as P
from heunwell import potential_value
from heunwell import twostate as ts

u0 = 3.0
z = np.linspace(1.5, 4.0, 801)  # starts inside the classically allowed region for U0^2 = 9
dz = ts.invert_detuning(P, u0, z)
print(f"Re delta_z spans [{dz.real.min():.4f}, {dz.real.max():.4f}]")
print(f"largest |Im delta_z|: {np.max(np.abs(dz.imag)):.3e}")

w = 2.0 * potential_value(P, z) - u0**2
back = ts.potential_of_detuning(dz, z)
print(f"round trip to the potential: max deviation {np.max(np.abs(back - w)[5:-5]):.1e}")

# starting in the forbidden region the seed is imaginary; a diverging case
try:
    ts.invert_detuning(None, 0.0, np.linspace(0, 3, 100), seed=0j, potential=lambda s: -1.0)
except ts.BlowUp as exc:
    print("blow-up detected:", exc)
