"""Independent checks: a Numerov shooting eigensolver and a plain 1F1 series.

Nothing here uses the closed-form solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar

from .potential import PhysicalParams, potential_value
from .specfun import EvalResult


class NotConverged(RuntimeError):
    pass


class TailNotSmall(ArithmeticError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    x_min: float = 1e-4
    x_max: float | None = None  # None: chosen from the WKB decay of the top level
    n_grid: int = 4000
    boundary: str = "dirichlet_both"
    decay: float = 44.0  # e-folds of |psi|^2 between the last turning point and x_max

    def __post_init__(self):
        if self.n_grid < 2000:
            raise ValueError("n_grid must be at least 2000")
        if self.x_min <= 0:
            raise ValueError("x_min must be positive")
        if self.boundary != "dirichlet_both":
            raise ValueError(f"unsupported boundary {self.boundary!r}")


def _shoot(v, energies, x, start_exponent, k2, want_nodes=False):
    """Numerov march from x[0] for every energy at once; returns psi(x[-1]).

    Uses the Y_i = (1 - h^2 g_i / 12) psi_i form with psi'' = g psi.
    """
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    h = x[1] - x[0]
    c = h * h * k2 / 12.0
    psi0 = x[0] ** start_exponent
    psi1 = x[1] ** start_exponent
    y_prev = (1.0 - c * (v[0] - E)) * psi0
    y_cur = (1.0 - c * (v[1] - E)) * psi1
    psi_cur = np.full_like(E, psi1)
    nodes = np.zeros(E.shape, dtype=int)
    for i in range(1, len(x) - 1):
        w = 1.0 - c * (v[i] - E)
        psi_cur = y_cur / w
        y_next = 2.0 * y_cur - y_prev + 12.0 * (1.0 - w) * psi_cur
        y_prev, y_cur = y_cur, y_next
        if want_nodes:
            nodes += (np.signbit(y_next) != np.signbit(y_prev)).astype(int)
        big = np.abs(y_cur) > 1e150
        if big.any():
            y_prev = np.where(big, y_prev * 1e-150, y_prev)
            y_cur = np.where(big, y_cur * 1e-150, y_cur)
    psi_end = y_cur / (1.0 - c * (v[-1] - E))
    return (psi_end, nodes) if want_nodes else psi_end


def _illinois(f, lo, hi, flo, fhi, tol=1e-15, max_iter=200):
    """Vectorized Illinois (modified regula falsi) on independent brackets."""
    lo, hi, flo, fhi = (np.array(v, dtype=float) for v in (lo, hi, flo, fhi))
    side = np.zeros(lo.shape, dtype=int)
    for _ in range(max_iter):
        mid = (lo * fhi - hi * flo) / (fhi - flo)
        bad = ~np.isfinite(mid) | (mid <= np.minimum(lo, hi)) | (mid >= np.maximum(lo, hi))
        mid = np.where(bad, 0.5 * (lo + hi), mid)
        fm = f(mid)
        left = np.sign(fm) == np.sign(flo)
        # replace the endpoint on the same side; halve the stale one twice in a row
        lo_new = np.where(left, mid, lo)
        flo_new = np.where(left, fm, np.where(side == -1, 0.5 * flo, flo))
        hi_new = np.where(left, hi, mid)
        fhi_new = np.where(left, np.where(side == 1, 0.5 * fhi, fhi), fm)
        side = np.where(left, 1, -1)
        lo, hi, flo, fhi = lo_new, hi_new, flo_new, fhi_new
        if np.all(np.abs(hi - lo) <= tol * np.maximum(1.0, np.abs(mid))) or np.all(fm == 0):
            break
    return np.where(fm == 0, mid, 0.5 * (lo + hi))


def _decay_point(potential, energy, x_turn, k2, decay):
    kappa = lambda t: math.sqrt(max(k2 * (potential(t) - energy), 0.0))
    action = lambda xm: 2.0 * quad(kappa, x_turn, xm, limit=200)[0] - decay
    hi = 1.6 * x_turn
    while action(hi) < 0:
        hi *= 1.5
    return brentq(action, x_turn, hi, xtol=1e-8)


def _outer_turning_point(potential, energy, x_lo, x_hi_guess):
    # start from the bottom of the well so the bracket straddles the wall
    probe = np.geomspace(x_lo, max(x_hi_guess, 10 * x_lo), 400)
    x_lo = float(probe[np.argmin(potential(probe))])
    hi = max(x_hi_guess, x_lo)
    while potential(hi) < energy:
        hi *= 2.0
    return brentq(lambda t: potential(t) - energy, x_lo, hi, xtol=1e-12)


def _eigen_once(potential, n_max, m, hbar, start_exponent, x, e_lo, e_hi, n_scan=600):
    k2 = 2.0 * m / hbar**2
    v = potential(x)
    f = lambda E: _shoot(v, E, x, start_exponent, k2)
    grid = np.linspace(e_lo, e_hi, n_scan)
    vals = f(grid)
    idx = np.flatnonzero(np.signbit(vals[1:]) != np.signbit(vals[:-1]))
    if idx.size < n_max:
        raise NotConverged(f"only {idx.size} sign changes below E={e_hi}")
    idx = idx[:n_max]
    return _illinois(f, grid[idx], grid[idx + 1], vals[idx], vals[idx + 1])


def shooting_eigenvalues(
    potential: Callable,
    n_max: int,
    *,
    start_exponent: float,
    e_floor: float,
    e_ceiling: float,
    cfg: OracleConfig = OracleConfig(),
    m: float = 1.0,
    hbar: float = 1.0,
    x_scale: float = 1.0,
    return_drift: bool = False,
):
    """Lowest ``n_max`` Dirichlet eigenvalues of -hbar^2/2m psi'' + V psi = E psi.

    The march starts on the regular branch ``psi ~ x^start_exponent`` at
    ``cfg.x_min`` and the eigenvalue condition is psi(x_max) = 0.  Each run is
    repeated on a doubled grid and Richardson-extrapolated for the O(h^4)
    Numerov error.  ``e_ceiling`` must lie above the n_max-th level.
    """
    k2 = 2.0 * m / hbar**2
    if cfg.x_max is None:
        x_turn = _outer_turning_point(potential, e_ceiling, cfg.x_min * 10, x_scale)
        x_max = _decay_point(potential, e_ceiling, x_turn, k2, cfg.decay)
    else:
        x_max = cfg.x_max
    runs = []
    for n in (cfg.n_grid, 2 * cfg.n_grid):
        x = np.linspace(cfg.x_min, x_max, n + 1)
        runs.append(_eigen_once(potential, n_max, m, hbar, start_exponent, x, e_floor, e_ceiling))
    coarse, fine = runs
    drift = np.abs(fine - coarse) / np.maximum(np.abs(fine), 1e-300)
    if np.any(drift > 1e-6):
        raise NotConverged(f"grid doubling moved eigenvalues by up to {drift.max():.2e}")
    extrapolated = fine + (fine - coarse) / 15.0
    out = [float(e) for e in extrapolated]
    return (out, drift) if return_drift else out


def _well_bottom(p: PhysicalParams) -> float:
    res = minimize_scalar(lambda t: potential_value(p, t), bounds=(1e-3, 1e3), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.fun)


def numerov_eigenvalues(p: PhysicalParams, cfg: OracleConfig = OracleConfig(), n_max: int = 5,
                        return_drift: bool = False):
    """First ``n_max`` levels of the x^(2/3) well by direct shooting."""
    p.require_bound()
    v = lambda t: potential_value(p, np.asarray(t, dtype=float))
    bottom = _well_bottom(p)
    # crude ceiling: the level count below E grows like (E - v0)^2; widen until enough
    scale = (p.hbar**2 * p.v1**3 / p.m) ** 0.25
    ceiling = bottom + scale * (1.0 + 1.2 * math.sqrt(n_max + 1.0))
    for _ in range(6):
        try:
            return shooting_eigenvalues(
                v, n_max, start_exponent=13.0 / 6.0, e_floor=bottom, e_ceiling=ceiling, cfg=cfg,
                m=p.m, hbar=p.hbar, x_scale=(p.hbar**2 / (p.m * p.v1)) ** 0.375 + 1.0,
                return_drift=return_drift,
            )
        except NotConverged as exc:
            if "sign changes" not in str(exc):
                raise
            ceiling = bottom + 1.5 * (ceiling - bottom)
    raise NotConverged("could not bracket the requested levels")


def numerov_eigenfunction(p: PhysicalParams, energy: float, cfg: OracleConfig = OracleConfig()):
    """(x, psi) marched outward at ``energy``; psi normalized to unit max."""
    k2 = 2.0 * p.m / p.hbar**2
    v = lambda t: potential_value(p, np.asarray(t, dtype=float))
    x_turn = _outer_turning_point(v, energy, cfg.x_min * 10, 1.0)
    x_max = cfg.x_max or _decay_point(v, energy, x_turn, k2, cfg.decay)
    x = np.linspace(cfg.x_min, x_max, cfg.n_grid + 1)
    vx = v(x)
    h = x[1] - x[0]
    c = h * h * k2 / 12.0
    w = 1.0 - c * (vx - energy)
    y = np.empty_like(x)
    y[0] = w[0] * x[0] ** (13.0 / 6.0)
    y[1] = w[1] * x[1] ** (13.0 / 6.0)
    for i in range(1, len(x) - 1):
        y[i + 1] = 2.0 * y[i] - y[i - 1] + 12.0 * (1.0 - w[i]) * y[i] / w[i]
    psi = y / w
    # past the outer turning point the march eventually picks up the growing
    # solution; cut where |psi| is smallest beyond the turning point
    beyond = np.flatnonzero(x > x_turn)
    cut = beyond[np.argmin(np.abs(psi[beyond]))] if beyond.size else len(x)
    x, psi = x[:cut], psi[:cut]
    return x, psi / np.max(np.abs(psi))


def kummer_series_reference(a, b, z, terms: int = 500) -> EvalResult:
    """Plain partial sum of sum_k (a)_k / (b)_k z^k / k!, no transformations.

    The tail after the last term is bounded by a geometric series in the
    final term ratio; ``TailNotSmall`` if that bound exceeds 1e-12 relative.
    """
    a, b, z = complex(a), complex(b), complex(z)
    if b.imag == 0 and b.real <= 0 and b.real == int(b.real):
        raise ValueError("b must not be a non-positive integer")
    if terms > 2000:
        raise ValueError("at most 2000 terms")
    term = 1.0 + 0j
    total = 1.0 + 0j
    k = 0
    for k in range(terms):
        term *= (a + k) / (b + k) * z / (k + 1)
        total += term
        if term == 0:
            return EvalResult(total, 0.0, k + 1)
    ratio = abs((a + terms) / (b + terms) * z / (terms + 1))
    tail = abs(term) * ratio / (1.0 - ratio) if ratio < 1 else math.inf
    if tail > 1e-12 * abs(total):
        raise TailNotSmall(f"tail bound {tail:.2e} after {terms} terms")
    return EvalResult(total, tail, terms)
