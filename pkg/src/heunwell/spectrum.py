"""Bound-state spectrum of the x^(2/3) well: exact roots, approximations,
normalized wavefunctions."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import brentq

from . import closedform as cf
from .potential import PhysicalParams, energy_from_a, potential_value, spectral_params, turning_points
from .specfun import gamma, hermite_nu

SCAN_START = 0.6
SCAN_STEP = 0.05
ROOT_XTOL = 1e-13
POLE_GUARD = 1e-12


class RootNotFound(RuntimeError):
    pass


class NormalizationError(RuntimeError):
    pass


def _b0_exact() -> float:
    g13 = gamma(1.0 / 3.0).value.real
    g23 = gamma(2.0 / 3.0).value.real
    return g13 / (6.0 * 3.0 ** (1.0 / 3.0) * g23)


B0_EXACT = _b0_exact()
B0_ROUNDED = 0.2


@dataclass(frozen=True)
class EnergyLevel:
    n: int
    a_exact: float
    e_exact: float
    e_approx14: float
    e_semiclassical: float

    @property
    def rel_err_approx14(self) -> float:
        return (self.e_approx14 - self.e_exact) / self.e_exact

    @property
    def rel_err_semiclassical(self) -> float:
        return (self.e_semiclassical - self.e_exact) / self.e_exact


@dataclass
class WavefunctionTable:
    x: np.ndarray
    psi: np.ndarray
    norm: float
    tail_fraction: float = 0.0
    imag_residue: float = 0.0


def _H(nu, z):
    return hermite_nu(nu, z).value.real


def spectrum_fn_exact(a: float) -> float:
    """sqrt(2a) H_{a+1/2}(-sqrt(2a)) + H_{a+3/2}(-sqrt(2a)); zero at bound states."""
    s = math.sqrt(2.0 * a)
    return s * _H(a + 0.5, -s) + _H(a + 1.5, -s)


def spectrum_fn_equivalent(a: float) -> float:
    """(1 + 2a) H_{a-1/2}(-sqrt(2a)) + sqrt(2a) H_{a+1/2}(-sqrt(2a))."""
    s = math.sqrt(2.0 * a)
    return (1.0 + 2.0 * a) * _H(a - 0.5, -s) + s * _H(a + 0.5, -s)


def auxiliary_F(a: float) -> float:
    s = math.sqrt(2.0 * a)
    den = (1.0 + 2.0 * a) * _H(a - 0.5, -s)
    if abs(den) < POLE_GUARD:
        raise cf.DenominatorZero(f"H_(a-1/2)(-sqrt(2a)) vanishes near a={a}")
    return 1.0 + s * _H(a + 0.5, -s) / den


def approx_F(a: float, b0: float = B0_EXACT) -> float:
    """Transition-region model of :func:`auxiliary_F`."""
    den = math.sin(math.pi * a + math.pi / 3.0)
    if abs(den) < POLE_GUARD:
        raise cf.DenominatorZero(f"sin(pi a + pi/3) vanishes near a={a}")
    a23 = a ** (2.0 / 3.0)
    ratio = math.sin(math.pi * a - math.pi / 3.0) / den
    return a23 / (3.0 * (1.0 + 2.0 * a) * b0) * (3.0 * b0 / a23 - ratio)


def transcendental_fn(a: float, b0: float = B0_EXACT) -> float:
    """3 b0 / a^(2/3) - sin(pi a - pi/3) / sin(pi a + pi/3); b0 = 1/5 gives the 3/5 form."""
    return 3.0 * b0 / a ** (2.0 / 3.0) - math.sin(math.pi * a - math.pi / 3.0) / math.sin(
        math.pi * a + math.pi / 3.0
    )


def solve_transcendental(n: int, b0: float = B0_EXACT) -> float:
    """Root of :func:`transcendental_fn` between the poles n - 1/3 and n + 2/3."""
    lo = n - 1.0 / 3.0 + 1e-9
    hi = n + 2.0 / 3.0 - 1e-9
    # the ratio vanishes at n + 1/3 and diverges at the right pole
    a0 = n + 1.0 / 3.0
    if transcendental_fn(a0, b0) * transcendental_fn(hi, b0) < 0:
        return brentq(transcendental_fn, a0, hi, args=(b0,), xtol=ROOT_XTOL)
    return brentq(transcendental_fn, lo, a0, args=(b0,), xtol=ROOT_XTOL)


def approx_a(n: int) -> float:
    m = n + 1.0 / 3.0
    return m + (1.0 / 6.0) / m ** (2.0 / 3.0) - (1.0 / 20.0) / m ** (4.0 / 3.0)


def _prefactor(p: PhysicalParams) -> float:
    return (128.0 * p.hbar**2 * p.v1**3 / (9.0 * p.m)) ** 0.25


def approx_level(p: PhysicalParams, n: int) -> float:
    """Two-term correction to the semiclassical levels."""
    p.require_bound()
    return _prefactor(p) * math.sqrt(approx_a(n)) + p.v0


def semiclassical_level(p: PhysicalParams, n: int) -> float:
    p.require_bound()
    return _prefactor(p) * math.sqrt(n + 1.0 / 3.0) + p.v0


def find_roots(fn, a_lo: float, a_hi: float, step: float = SCAN_STEP, xtol: float = ROOT_XTOL):
    """Sign-change scan of ``fn`` on [a_lo, a_hi] followed by Brent refinement."""
    grid = np.arange(a_lo, a_hi + 0.5 * step, step)
    vals = [fn(a) for a in grid]
    roots = []
    for (x0, f0), (x1, f1) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if f0 == 0.0:
            roots.append(float(x0))
        elif f0 * f1 < 0:
            roots.append(brentq(fn, x0, x1, xtol=xtol, rtol=4 * np.finfo(float).eps))
    return roots


def exact_roots(n_max: int, fn=spectrum_fn_exact) -> list[float]:
    """First ``n_max`` roots above the spurious a = 1/2."""
    hi = n_max + 1.0
    for _ in range(4):
        roots = find_roots(fn, SCAN_START, hi)
        if len(roots) >= n_max:
            return roots[:n_max]
        hi += 2.0
    raise RootNotFound(f"found only {len(roots)} of {n_max} roots below a={hi}")


def make_level(p: PhysicalParams, n: int, a_n: float) -> EnergyLevel:
    return EnergyLevel(
        n=n,
        a_exact=a_n,
        e_exact=energy_from_a(p, a_n),
        e_approx14=approx_level(p, n),
        e_semiclassical=semiclassical_level(p, n),
    )


def solve_levels_exact(p: PhysicalParams, n_max: int) -> list[EnergyLevel]:
    p.require_bound()
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    roots = exact_roots(n_max)
    return [make_level(p, n, a) for n, a in enumerate(roots, start=1)]


def solve_levels_parallel(p: PhysicalParams, n_max: int, workers: int = 1) -> list[EnergyLevel]:
    """Same roots as :func:`solve_levels_exact`, one bracket [n, n+1] per task."""
    p.require_bound()

    def one(n):
        lo = SCAN_START if n == 1 else float(n)
        r = find_roots(spectrum_fn_exact, lo, n + 1.0)
        if len(r) != 1:
            raise RootNotFound(f"expected one root in ({lo}, {n + 1}), got {len(r)}")
        return make_level(p, n, r[0])

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(one, range(1, n_max + 1)))


# ---------------------------------------------------------------------------
# wavefunctions
# ---------------------------------------------------------------------------


def join_point(p: PhysicalParams, energy: float) -> float:
    """x where z = sqrt(2a): both closed forms are free of cancellation there."""
    sp = spectral_params(p, energy)
    return (math.sqrt(2.0 * sp.a) / math.sqrt(3.0 * sp.epsilon)) ** 1.5


def bound_state_values(p: PhysicalParams, energy: float, x) -> np.ndarray:
    """Unnormalized complex bound state on ``x``.

    Inside the join point this is the general solution with the
    origin-matched coefficient ratio; outside it is the decaying solution
    rescaled to coincide at the join point.
    """
    xa = np.asarray(x, dtype=float)
    xj = join_point(p, energy)
    out = np.empty(xa.shape, complex)
    inner = xa <= xj
    if np.any(inner):
        out[inner] = cf.matched_solution(p, energy, xa[inner])
    if np.any(~inner):
        ctx = cf.SolutionContext(p, energy)
        scale = cf.matched_solution(p, energy, xj) / cf.decaying_solution(ctx, xj)
        out[~inner] = scale * cf.decaying_solution(ctx, xa[~inner])
    return out


def default_grid(p: PhysicalParams, e_max: float, n_points: int = 4001, decay: float = 40.0) -> np.ndarray:
    """Uniform grid from near the origin to where |psi|^2 has dropped by e^-decay.

    The cut-off solves 2 int_{x_out}^{x_max} sqrt(2m(V - E))/hbar dx = decay.
    """
    from scipy.integrate import quad

    _, x_out = turning_points(p, e_max)
    k = lambda x: math.sqrt(max(2.0 * p.m * (potential_value(p, x) - e_max), 0.0)) / p.hbar
    action = lambda xm: 2.0 * quad(k, x_out, xm, limit=200)[0] - decay
    hi = 2.0 * x_out
    while action(hi) < 0:
        hi *= 1.5
    x_max = brentq(action, x_out, hi, xtol=1e-6)
    return np.linspace(x_max / n_points, x_max, n_points)


def _norm_integral(x, dens):
    body = simpson(dens, x=x)
    # density ~ x^(13/3) at the origin
    head = dens[0] * x[0] / (13.0 / 3.0 + 1.0)
    # exponential extrapolation of the last few samples
    d1, d0 = dens[-1], dens[-4]
    tail = 0.0
    if d1 > 0 and d0 > d1:
        kappa = math.log(d0 / d1) / (x[-1] - x[-4])
        tail = d1 / kappa
    elif d1 > 0:
        tail = math.inf
    return body + head, head + tail


def bound_state_wavefunction(p: PhysicalParams, level: EnergyLevel, grid=None) -> WavefunctionTable:
    """Real, normalized bound state sampled on ``grid``."""
    x = default_grid(p, level.e_exact) if grid is None else np.asarray(grid, dtype=float)
    if x.size < 3:
        raise ValueError("grid needs at least 3 points")
    psi = bound_state_values(p, level.e_exact, x)
    mid = psi[len(psi) // 2]
    if mid == 0:
        mid = psi[np.argmax(np.abs(psi))]
    psi = psi * (abs(mid) / mid)
    imag = float(np.max(np.abs(psi.imag)) / np.max(np.abs(psi.real)))
    psi = psi.real
    total, missing = _norm_integral(x, psi**2)
    if missing > 1e-6 * total:
        raise NormalizationError(
            f"level {level.n}: unresolved tail carries {missing / total:.2e} of the norm; extend the grid"
        )
    psi = psi / math.sqrt(total)
    # sign convention: positive first lobe
    first = psi[np.argmax(np.abs(psi) > 1e-3 * np.max(np.abs(psi)))]
    if first < 0:
        psi = -psi
    return WavefunctionTable(x=x, psi=psi, norm=1.0, tail_fraction=missing / total, imag_residue=imag)


def count_nodes(psi, rel_floor: float = 1e-6) -> int:
    """Sign changes among samples with |psi| above ``rel_floor * max|psi|``."""
    psi = np.asarray(psi)
    keep = psi[np.abs(psi) > rel_floor * np.max(np.abs(psi))]
    return int(np.count_nonzero(np.signbit(keep[1:]) != np.signbit(keep[:-1])))


def overlap(t1: WavefunctionTable, t2: WavefunctionTable) -> float:
    if t1.x.shape != t2.x.shape or not np.allclose(t1.x, t2.x):
        raise ValueError("tables must share a grid")
    return float(simpson(t1.psi * t2.psi, x=t1.x))
