"""Special functions behind the closed-form solutions.

Run: python demos/01_special_functions.py
"""

import math

import numpy as np

from heunwell import gamma, hermite_nu, kummer_1f1

# Gamma on the complex plane, including the reflection half-plane
for z in (0.5, 1 / 3, -2.5, 1 + 1j):
    print(f"Gamma({z}) = {complex(gamma(z).value):.12g}")
print("sqrt(pi)  =", math.sqrt(math.pi))

# Kummer 1F1 and its transformation 1F1(a;b;z) = e^z 1F1(b-a;b;-z)
a, b, z = -3.7, 1.5, 6.0
lhs = kummer_1f1(a, b, z).value
rhs = math.exp(z) * kummer_1f1(b - a, b, -z).value
print(f"\n1F1({a};{b};{z}) = {complex(lhs).real:.15g}, via transformation {complex(rhs).real:.15g}")

# Hermite functions of non-integer order; integer orders give the polynomials
print("\nH_3(0.7) =", hermite_nu(3, 0.7).value.real, " polynomial:", 8 * 0.7**3 - 12 * 0.7)
nu = 1.25
zs = np.linspace(-2, 2, 5)
h = hermite_nu(nu, zs).value.real
print(f"H_{nu}(z) on {zs}:\n ", h)

# the three-term recurrence the spectrum equations rely on
z = 0.9
r = hermite_nu(nu + 1, z).value - 2 * z * hermite_nu(nu, z).value + 2 * nu * hermite_nu(nu - 1, z).value
print(f"recurrence residual at nu={nu}, z={z}: {abs(r):.1e}")

# here the two Kummer terms cancel almost completely; the inward route keeps full accuracy
res = hermite_nu(0.3, 9.0)
print(f"H_0.3(9) = {res.value.real:.6e} (error estimate {res.abs_error_estimate:.1e})")
