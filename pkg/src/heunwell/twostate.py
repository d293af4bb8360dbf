"""Nonlinear two-state atom-molecule conversion and its linear counterpart.

Nonlinear system (a1 atoms, a2 molecules)::

    i a1' = U e^{-i delta} conj(a1) a2
    i a2' = (U / 2) e^{i delta} a1^2

conserves |a1|^2 + 2|a2|^2.  The linear counterpart used for p_L is

    i a1' = sqrt(2) U e^{-i delta} a2,   i a2' = (U / sqrt(2)) e^{i delta} a1

which keeps the same conserved quantity, so p_L lies in [0, 1/2] and
matches p to leading order in weak fields.  Eliminating a1 from either
system gives

    a2'' + (-i delta_t - U_t / U) a2' + U^2 a2 = 2 U^2 |a2|^2 a2

with the right-hand side dropped in the linear case.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import least_squares
from scipy.signal import savgol_filter

from .potential import DomainError, PhysicalParams, potential_value

TOL_RANGE = (1e-12, 1e-6)
_SQRT2 = math.sqrt(2.0)


class StepFailure(RuntimeError):
    pass


class BlowUp(ArithmeticError):
    pass


class NoPhysicalRoot(ArithmeticError):
    pass


@dataclass(frozen=True)
class TwoStateAmplitudes:
    a1: complex = 1.0 + 0j
    a2: complex = 0j

    @property
    def invariant(self) -> float:
        return abs(self.a1) ** 2 + 2.0 * abs(self.a2) ** 2


@dataclass(frozen=True)
class PulseConfig:
    """Field configuration.

    ``U(t)`` is the Rabi frequency, ``delta(t)`` the phase modulation and
    ``delta_t(t)`` its derivative, the detuning.  ``dU`` and ``delta_tt`` are
    the next derivatives; they are only used by the residual checks and are
    estimated from samples when missing.

    The default shape is ``U = u0 sech(t)`` with detuning
    ``delta_t = delta0 (tanh t + 1/2)``: it sweeps from -delta0/2 to
    3 delta0/2, so delta0 sets both the limits and how lopsided the
    resonance crossing is.  The envelope is positive everywhere but below
    1e-8 u0 outside |t| < 19.4, which is the default span.
    """

    u0: float = 10.0
    delta0: float = 40.0
    U: Callable | None = None
    dU: Callable | None = None
    delta: Callable | None = None
    delta_t: Callable | None = None
    delta_tt: Callable | None = None
    t_span: tuple = (-20.0, 20.0)
    name: str = "sech"

    def __post_init__(self):
        if self.u0 < 0:
            raise DomainError("u0 must be non-negative")
        if self.U is None:
            u0, d0 = self.u0, self.delta0
            object.__setattr__(self, "U", lambda t: u0 / np.cosh(t))
            object.__setattr__(self, "dU", lambda t: -u0 * np.tanh(t) / np.cosh(t))
            # log cosh written to stay finite for large |t|
            object.__setattr__(
                self, "delta",
                lambda t: d0 * (np.abs(t) + np.log1p(np.exp(-2.0 * np.abs(t))) - math.log(2.0) + 0.5 * t),
            )
            object.__setattr__(self, "delta_t", lambda t: d0 * (np.tanh(t) + 0.5))
            object.__setattr__(self, "delta_tt", lambda t: d0 / np.cosh(t) ** 2)
        elif self.delta is None or self.delta_t is None:
            raise ValueError("custom pulses need U plus the phase delta with its derivative delta_t")

    @classmethod
    def constant(cls, u0: float, detuning: float = 0.0, t_span=(0.0, 10.0)) -> "PulseConfig":
        """Constant Rabi frequency and constant detuning."""
        return cls(
            u0=u0, delta0=detuning,
            U=lambda t: np.full_like(np.asarray(t, dtype=float), u0),
            dU=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            delta=lambda t: detuning * np.asarray(t, dtype=float),
            delta_t=lambda t: np.full_like(np.asarray(t, dtype=float), detuning),
            delta_tt=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            t_span=t_span, name="constant",
        )

    def with_u0(self, u0: float) -> "PulseConfig":
        if self.name == "sech":
            return PulseConfig(u0=u0, delta0=self.delta0, t_span=self.t_span)
        if self.name == "constant":
            return PulseConfig.constant(u0, self.delta0, self.t_span)
        raise ValueError("only built-in pulses can be rescaled")

    def to_dict(self) -> dict:
        return {"shape": self.name, "u0": self.u0, "delta0": self.delta0, "t_span": list(self.t_span)}


@dataclass
class TwoStateTrajectory:
    t: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    linear: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def p(self) -> np.ndarray:
        return np.abs(self.a2) ** 2

    @property
    def state(self) -> list[TwoStateAmplitudes]:
        return [TwoStateAmplitudes(complex(x), complex(y)) for x, y in zip(self.a1, self.a2)]

    @property
    def invariant(self) -> np.ndarray:
        return np.abs(self.a1) ** 2 + 2.0 * np.abs(self.a2) ** 2

    @property
    def norm_drift(self) -> np.ndarray:
        return self.invariant - self.invariant[0]

    @property
    def p_final(self) -> float:
        return float(self.p[-1])


def _rhs_nonlinear(pulse: PulseConfig):
    def f(t, y):
        a1 = y[0] + 1j * y[1]
        a2 = y[2] + 1j * y[3]
        u = pulse.U(t)
        ph = np.exp(1j * pulse.delta(t))
        d1 = -1j * u * np.conj(ph) * np.conj(a1) * a2
        d2 = -0.5j * u * ph * a1 * a1
        return [d1.real, d1.imag, d2.real, d2.imag]

    return f


def _rhs_linear(pulse: PulseConfig):
    def f(t, y):
        a1 = y[0] + 1j * y[1]
        a2 = y[2] + 1j * y[3]
        u = pulse.U(t)
        ph = np.exp(1j * pulse.delta(t))
        d1 = -1j * _SQRT2 * u * np.conj(ph) * a2
        d2 = -1j * (u / _SQRT2) * ph * a1
        return [d1.real, d1.imag, d2.real, d2.imag]

    return f


def _sample_count(pulse: PulseConfig, t_span) -> int:
    # resolve the fastest phase rotation with ~40 samples, and keep at least
    # 100 per unit time for the derivative fits in the residual checks
    tt = np.linspace(t_span[0], t_span[1], 2001)
    width = t_span[1] - t_span[0]
    rate = float(np.max(np.abs(pulse.U(tt))) + np.max(np.abs(pulse.delta_t(tt)))) + 1.0
    return int(min(200_001, max(2001, 100 * width + 1, 40 * rate * width / (2 * math.pi))))


def _integrate(rhs, pulse, t_span, init, tol, n_samples, linear):
    if not TOL_RANGE[0] <= tol <= TOL_RANGE[1]:
        raise ValueError(f"tol must lie in {TOL_RANGE}")
    t_span = tuple(float(v) for v in (t_span or pulse.t_span))
    n = n_samples or _sample_count(pulse, t_span)
    t_eval = np.linspace(t_span[0], t_span[1], n)
    y0 = [init.a1.real, init.a1.imag, init.a2.real, init.a2.imag]
    sol = solve_ivp(rhs, t_span, y0, method="DOP853", t_eval=t_eval, rtol=tol, atol=tol * 1e-2)
    if not sol.success:
        raise StepFailure(sol.message)
    y = sol.y
    return TwoStateTrajectory(
        t=sol.t, a1=y[0] + 1j * y[1], a2=y[2] + 1j * y[3], linear=linear,
        meta={"pulse": pulse.to_dict(), "tol": tol, "nfev": int(sol.nfev)},
    )


def simulate_nonlinear(
    pulse: PulseConfig,
    t_span=None,
    init: TwoStateAmplitudes = TwoStateAmplitudes(),
    tol: float = 1e-12,
    n_samples: int | None = None,
) -> TwoStateTrajectory:
    """Integrate the nonlinear system with an adaptive 8(5,3) Runge-Kutta pair.

    Samples are uniform in t so that derivative fits downstream are simple.
    """
    if abs(init.invariant - 1.0) > 1e-12:
        raise ValueError("initial state must satisfy |a1|^2 + 2|a2|^2 = 1")
    return _integrate(_rhs_nonlinear(pulse), pulse, t_span, init, tol, n_samples, linear=False)


def simulate_linear(pulse: PulseConfig, t_span=None, tol: float = 1e-12,
                    n_samples: int | None = None) -> TwoStateTrajectory:
    """Linear counterpart started from a1 = 1; ``p`` is p_L."""
    return _integrate(_rhs_linear(pulse), pulse, t_span, TwoStateAmplitudes(), tol, n_samples, linear=True)


def analytic_zero_detuning(u0: float, t) -> np.ndarray:
    """p(t) for constant U and no detuning, starting from a1 = 1."""
    return 0.5 * np.tanh(u0 * np.asarray(t) / math.sqrt(2.0)) ** 2


# ---------------------------------------------------------------------------
# residual checks
# ---------------------------------------------------------------------------


def _uniform_step(t):
    h = np.diff(t)
    if t.size < 9 or not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("residual checks need at least 9 uniform samples")
    return float(h[0])


def _fit_derivatives(y, h, window=13, order=8):
    d1 = savgol_filter(y, window, order, deriv=1, delta=h, mode="interp")
    d2 = savgol_filter(y, window, order, deriv=2, delta=h, mode="interp")
    return d1, d2


_EDGE = 6
U_FLOOR = 1e-4


def _derivative(fn, samples, t):
    if fn is not None:
        return fn(t)
    return np.gradient(samples, t, edge_order=2)


def second_order_residual(traj: TwoStateTrajectory, pulse: PulseConfig, with_nonlinear: bool = True) -> float:
    """Max over samples of |a2'' + (-i delta_t - U_t/U) a2' + U^2 a2 - 2 U^2 |a2|^2 a2|.

    Derivatives of a2 come from local degree-8 polynomial fits.  With
    ``with_nonlinear=False`` the cubic term is left out.
    """
    a2 = traj.a2
    if not np.any(a2):
        return 0.0
    h = _uniform_step(traj.t)
    u = pulse.U(traj.t)
    if np.any(u <= 0):
        raise DomainError("U vanishes on the trajectory")
    d1r, d2r = _fit_derivatives(a2.real, h)
    d1i, d2i = _fit_derivatives(a2.imag, h)
    d1, d2 = d1r + 1j * d1i, d2r + 1j * d2i
    du = _derivative(pulse.dU, u, traj.t)
    lhs = d2 + (-1j * pulse.delta_t(traj.t) - du / u) * d1 + u**2 * a2
    if with_nonlinear:
        lhs = lhs - 2.0 * u**2 * np.abs(a2) ** 2 * a2
    # polynomial fits lose accuracy at the ends; drop a window on each side
    return float(np.max(np.abs(lhs[_EDGE:-_EDGE])))


def identity_sides(traj: TwoStateTrajectory, pulse: PulseConfig):
    """Both sides of p(1 - 2p)^2 = (dp/dt)^2 / U^2 + (int (delta_t / U) dp)^2.

    dp/dt comes from local polynomial fits of the sampled p.  The integral
    is taken by parts, (delta_t / U) p - int p d(delta_t / U), whose
    integrand stays bounded where U dies off.  For constant U the last term
    is (int delta_t dp)^2 / U^2.
    """
    t, p = traj.t, traj.p
    h = _uniform_step(t)
    u = pulse.U(t)
    if np.any(u <= 0):
        raise DomainError("U vanishes on the trajectory")
    dt_ = pulse.delta_t(t)
    du = _derivative(pulse.dU, u, t)
    dtt = _derivative(pulse.delta_tt, dt_, t)
    dp, _ = _fit_derivatives(p, h)
    g = dt_ / u
    dg = dtt / u - dt_ * du / u**2
    integral = g * p - cumulative_simpson(p * dg, dx=h, initial=0.0)
    lhs = p * (1.0 - 2.0 * p) ** 2
    return lhs, (dp / u) ** 2 + integral**2


def integral_identity_residual(traj: TwoStateTrajectory, pulse: PulseConfig) -> float:
    """Max |lhs - rhs| of :func:`identity_sides`.

    Samples where U is below ``U_FLOOR`` of its peak are skipped: there the
    fitted dp/dt divided by U is mostly rounding noise.
    """
    if traj.linear:
        raise ValueError("the identity holds for the nonlinear system")
    if abs(traj.a2[0]) > 1e-14:
        raise ValueError("the identity assumes a2 = 0 at the start")
    if not np.any(traj.a2):
        return 0.0
    lhs, rhs = identity_sides(traj, pulse)
    u = pulse.U(traj.t)
    keep = u >= U_FLOOR * np.max(u)
    keep[:_EDGE] = keep[-_EDGE:] = False
    return float(np.max(np.abs(lhs - rhs)[keep]))


# ---------------------------------------------------------------------------
# detuning <-> potential
# ---------------------------------------------------------------------------


def potential_of_detuning(delta_z, grid) -> np.ndarray:
    """-(delta_z^2)/4 - i delta_zz / 2 from samples of delta_z on ``grid``."""
    dz = np.asarray(delta_z, dtype=complex)
    g = np.asarray(grid, dtype=float)
    if dz.shape != g.shape or g.size < 3:
        raise ValueError("delta_z and grid must match and have at least 3 points")
    dzz = CubicSpline(g, dz).derivative()(g)
    return -(dz**2) / 4.0 - 0.5j * dzz


def invert_detuning(
    p: PhysicalParams | None,
    u0: float,
    grid,
    seed: complex | None = None,
    potential: Callable | None = None,
    limit: float = 1e6,
) -> np.ndarray:
    """Solve -delta_z^2/4 - i delta_zz/2 = W(z) for complex delta_z on ``grid``.

    W is ``potential(z)`` if given, otherwise the dimensionless potential
    (2m/hbar^2)(V(z) - v0) of ``p`` shifted by u0^2 so that U0^2 acts as the
    energy.  The equation is the Riccati ODE

        delta_zz = 2i (W + delta_z^2 / 4).

    The default ``seed`` is the constant-W fixed point 2 sqrt(-W(z0)).
    The real part of the result is the candidate detuning; the imaginary
    part is the diagnostic of how far the real field is from exact.
    """
    z = np.asarray(grid, dtype=float)
    if z.size < 2 or np.any(np.diff(z) <= 0):
        raise ValueError("grid must be increasing with at least 2 points")
    if potential is None:
        if p is None:
            raise ValueError("need either params or a potential")
        if np.any(z <= 0):
            raise DomainError("grid must lie on z > 0")
        k2 = 2.0 * p.m / p.hbar**2
        W = lambda s: k2 * (potential_value(p, s) - p.v0) - u0**2
    else:
        W = potential
    if seed is None:
        seed = 2.0 * np.sqrt(complex(-W(z[0])))

    def rhs(s, y):
        d = y[0] + 1j * y[1]
        r = 2j * (W(s) + d * d / 4.0)
        return [r.real, r.imag]

    def escape(s, y):
        return limit - math.hypot(y[0], y[1])

    escape.terminal = True
    sol = solve_ivp(rhs, (z[0], z[-1]), [seed.real, seed.imag], method="DOP853", t_eval=z,
                    events=escape, rtol=1e-11, atol=1e-12)
    if sol.status == 1 or sol.t.size < z.size:
        raise BlowUp(f"|delta_z| exceeded {limit:g} near z={sol.t[-1]:.6g}")
    if not sol.success:
        raise StepFailure(sol.message)
    return sol.y[0] + 1j * sol.y[1]


# ---------------------------------------------------------------------------
# final probability
# ---------------------------------------------------------------------------


def _cubic_roots(a0, u0, pl):
    c = a0 / u0**2
    # 2p^3 - p^2 + c p - c pl / 2 = 0, Cardano via numpy's companion matrix is
    # too loose near the double root, so solve in trigonometric/real form
    A, B, C = -0.5, c / 2.0, -c * pl / 4.0  # monic: p^3 + A p^2 + B p + C
    q = (3 * B - A * A) / 9.0
    r = (9 * A * B - 27 * C - 2 * A**3) / 54.0
    disc = q**3 + r * r
    shift = -A / 3.0
    if disc > 0:
        sq = math.sqrt(disc)
        return [shift + float(np.cbrt(r + sq) + np.cbrt(r - sq))]
    theta = math.acos(max(-1.0, min(1.0, r / math.sqrt(-(q**3))))) if q < 0 else 0.0
    m = 2.0 * math.sqrt(-q) if q < 0 else 0.0
    return [shift + m * math.cos((theta + 2 * math.pi * k) / 3.0) for k in range(3)]


def final_probability_cubic(a0_fit: float, u0: float, pl_inf: float) -> float:
    """Largest real root <= 1/2 of p^2 - 2p^3 = (a0/u0^2)(p - pl_inf/2)."""
    if a0_fit <= 0 or u0 <= 0:
        raise DomainError("a0 and u0 must be positive")
    if not 0.0 <= pl_inf <= 1.0:
        raise DomainError("pl_inf must lie in [0, 1]")
    roots = [r for r in _cubic_roots(a0_fit, u0, pl_inf) if -1e-12 <= r <= 0.5 + 1e-12]
    if not roots:
        raise NoPhysicalRoot(f"no root in [0, 1/2] for a0={a0_fit}, u0={u0}, pl={pl_inf}")
    return min(max(roots), 0.5)


def final_probability_asymptotic(a0_fit: float, u0: float, pl_inf: float) -> float:
    return 0.5 - (2.0 - pl_inf) / 4.0 * math.sqrt(2.0 * a0_fit / u0**2)


@dataclass
class SweepRow:
    lam: float
    p_inf: float
    pl_inf: float
    p_cubic: float = math.nan
    p_asymptotic: float = math.nan


def _one_point(pulse: PulseConfig, lam: float, tol: float):
    pz = pulse.with_u0(math.sqrt(lam))
    return SweepRow(lam, simulate_nonlinear(pz, tol=tol).p_final, simulate_linear(pz, tol=tol).p_final)


def sweep_lambda(pulse: PulseConfig, lambdas: Sequence[float], tol: float = 1e-10, workers: int = 1):
    """Final p and p_L over lambda = u0^2 at fixed pulse shape."""
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(lambda lam: _one_point(pulse, lam, tol), lambdas))


def fit_a0(rows: Sequence[SweepRow], a0_start: float = 1.0) -> float:
    """Least-squares a0 so the cubic root matches the simulated p_inf."""

    def resid(v):
        a0 = math.exp(v[0])
        out = []
        for r in rows:
            try:
                out.append(final_probability_cubic(a0, math.sqrt(r.lam), r.pl_inf) - r.p_inf)
            except NoPhysicalRoot:
                out.append(1.0)
        return out

    sol = least_squares(resid, [math.log(a0_start)], x_scale=1.0)
    return float(math.exp(sol.x[0]))


def complete_sweep(rows: Sequence[SweepRow], a0: float):
    for r in rows:
        u0 = math.sqrt(r.lam)
        r.p_cubic = final_probability_cubic(a0, u0, r.pl_inf)
        r.p_asymptotic = final_probability_asymptotic(a0, u0, r.pl_inf)
    return rows
