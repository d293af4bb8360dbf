"""Nonlinear two-state conversion: conservation, identities, saturation.

Run: python demos/05_two_state.py   (about 15 s)
"""

import numpy as np

from heunwell import twostate as ts

# constant field, no detuning: p(t) = tanh^2(U t / sqrt 2) / 2
pulse = ts.PulseConfig.constant(1.5)
traj = ts.simulate_nonlinear(pulse)
err = np.max(np.abs(traj.p - ts.analytic_zero_detuning(1.5, traj.t)))
print(f"closed form deviation {err:.1e}, invariant drift {np.max(np.abs(traj.norm_drift)):.1e}")

# a detuned sech pulse and the residuals of the derived relations
pulse = ts.PulseConfig(u0=4.0, delta0=10.0)
traj = ts.simulate_nonlinear(pulse)
lin = ts.simulate_linear(pulse)
print(f"\nsech pulse u0=4, delta0=10: p_final = {traj.p_final:.6f}, linear p_L = {lin.p_final:.6f}")
print(f"second-order equation residual: {ts.second_order_residual(traj, pulse):.1e}")
print(f"integral identity residual:     {ts.integral_identity_residual(traj, pulse):.1e}")

# saturation of the final probability with lambda = u0^2
rows = ts.sweep_lambda(ts.PulseConfig(), np.linspace(10, 400, 8), workers=4)
a0 = ts.fit_a0(rows)
ts.complete_sweep(rows, a0)
print(f"\nfitted a0 = {a0:.3f}")
print(f"{'lambda':>8} {'p_num':>9} {'p_cubic':>9} {'p_sqrt':>9} {'p_L':>9}")
for r in rows:
    print(f"{r.lam:8.1f} {r.p_inf:9.5f} {r.p_cubic:9.5f} {r.p_asymptotic:9.5f} {r.pl_inf:9.5f}")
print("the cubic root nears 1/2 linearly in a0/lambda, the asymptote only like its square root")
