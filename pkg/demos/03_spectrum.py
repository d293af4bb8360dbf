"""Bound-state spectrum: exact roots against the approximate formulas.

Run: python demos/03_spectrum.py
"""

from heunwell import REFERENCE_PRESET as P
from heunwell import spectrum as sp

print(f"spurious root: F(a=1/2) = {sp.spectrum_fn_exact(0.5):.1e}")

levels = sp.solve_levels_exact(P, 8)
print(f"\n{'n':>2} {'a_n':>10} {'E_exact':>12} {'E_approx':>12} {'rel.err':>10} {'semicl.err':>10}")
for l in levels:
    print(f"{l.n:2d} {l.a_exact:10.6f} {l.e_exact:12.8f} {l.e_approx14:12.8f} "
          f"{l.rel_err_approx14:10.2e} {l.rel_err_semiclassical:10.2e}")

print("\nroots approach n + 1/3 (Maslov correction gamma = 1/3):")
print("  ", [round(l.a_exact - (l.n + 1 / 3), 4) for l in levels])

print(f"\nB0 from the Gamma formula: {sp.B0_EXACT:.7f} (rounded: {sp.B0_ROUNDED})")
for n in (1, 2, 3):
    print(f"  transcendental root n={n}: {sp.solve_transcendental(n):.6f} / "
          f"{sp.solve_transcendental(n, sp.B0_ROUNDED):.6f}; exact {levels[n - 1].a_exact:.6f}")

# normalized wavefunctions on a shared grid
grid = sp.default_grid(P, levels[2].e_exact)
tabs = [sp.bound_state_wavefunction(P, l, grid) for l in levels[:3]]
print("\nnodes:", [sp.count_nodes(t.psi) for t in tabs])
print("overlaps <1|2>, <1|3>, <2|3>:",
      [f"{sp.overlap(tabs[i], tabs[j]):.1e}" for i, j in ((0, 1), (0, 2), (1, 2))])
