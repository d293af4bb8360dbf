"""Closed-form solutions of the Schrodinger equation for the x^(2/3) well.

A fundamental solution is

    psi_F(x) = x^(-7/6) exp(-(s - z)^2 / 2) u(x),
    u = (s (1 - 2 z^2) - z (3 - 2 z^2)) H_{a+1/2}(s - z) - (1 - z^2) H_{a+3/2}(s - z),

with ``s = sqrt(2a)`` and ``z = sqrt(3 epsilon) x^(2/3)``.  The mirror
branch substitutes ``epsilon -> -epsilon, a -> -a`` (principal complex
square roots throughout).

Derivatives are exact: ``u`` is stored as polynomial coefficients attached
to Hermite functions of shifted order, and differentiated with
``H'_nu = 2 nu H_{nu-1}``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial as P

from . import specfun
from .potential import DomainError, PhysicalParams, SpectralParams, potential_value, spectral_params

DENOMINATOR_TOL = 1e-14
# Below this value of |z| the origin-matched combination loses more than ~z^5 of
# its digits to cancellation; the regular Frobenius series takes over.
SERIES_Z = 0.1


class DenominatorZero(ArithmeticError):
    pass


class Branch(enum.Enum):
    PRINCIPAL = "principal"
    MIRROR = "mirror"


@dataclass(frozen=True)
class SolutionContext:
    params: PhysicalParams
    energy: float
    branch: Branch = Branch.PRINCIPAL

    @property
    def spectral(self) -> SpectralParams:
        return spectral_params(self.params, self.energy)

    def mirrored(self) -> "SolutionContext":
        other = Branch.MIRROR if self.branch is Branch.PRINCIPAL else Branch.PRINCIPAL
        return replace(self, branch=other)

    def signed(self) -> tuple[complex, complex]:
        """(epsilon, a) with the branch sign applied."""
        sp = self.spectral
        sign = 1.0 if self.branch is Branch.PRINCIPAL else -1.0
        return complex(sign * sp.epsilon), complex(sign * sp.a)


@dataclass(frozen=True)
class GeneralSolution:
    c1: complex
    c2: complex
    params: PhysicalParams
    energy: float

    @property
    def principal(self) -> SolutionContext:
        return SolutionContext(self.params, self.energy, Branch.PRINCIPAL)

    @property
    def mirror(self) -> SolutionContext:
        return SolutionContext(self.params, self.energy, Branch.MIRROR)


def _check_x(x):
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa <= 0):
        raise DomainError("x must be positive")
    return xa


def z_of_x(s: SpectralParams, x, branch: Branch = Branch.PRINCIPAL):
    """z = sqrt(3 epsilon) x^(2/3); imaginary on the mirror branch."""
    xa = _check_x(x)
    eps = s.epsilon if branch is Branch.PRINCIPAL else -s.epsilon
    z = cmath.sqrt(3.0 * eps) * np.cbrt(xa) ** 2
    if branch is Branch.PRINCIPAL:
        z = z.real
    return z[0] if np.ndim(x) == 0 else z


# u(z) as {order offset j: polynomial in z} multiplying y_{nu1 + j}(w)
def _u_terms(s):
    p_coef = np.array([s, -3.0, -2.0 * s, 2.0], dtype=complex)
    q_coef = np.array([1.0, 0.0, -1.0], dtype=complex)
    return {0: p_coef, 1: -q_coef}


def _d_terms(terms, nu1):
    """d/dz of sum_j p_j(z) y_{nu1+j}(s - z)."""
    out: dict[int, np.ndarray] = {}

    def add(j, c):
        out[j] = P.polyadd(out.get(j, np.zeros(1, complex)), c)

    for j, c in terms.items():
        add(j, P.polyder(c))
        add(j - 1, -2.0 * (nu1 + j) * c)
    return out


def _hermite_block(nu1, w, offsets, reflected, kummer=False):
    ys = {}
    arg = -w if reflected else w
    for j in offsets:
        if kummer:
            h, _, _ = specfun._hermite_kummer(complex(nu1 + j), arg)
        else:
            h = specfun.hermite_nu(nu1 + j, arg).value
        ys[j] = h * (-1.0) ** j if reflected else h
    return ys


def _evaluate(ctx: SolutionContext, x, derivatives=0, reflected=False, kummer=False):
    """psi and up to two x-derivatives for one branch."""
    xa = _check_x(x)
    eps, a = ctx.signed()
    s = cmath.sqrt(2.0 * a)
    c = cmath.sqrt(3.0 * eps)
    nu1 = a + 0.5
    z = c * np.cbrt(xa) ** 2
    w = s - z
    u0 = _u_terms(s)
    levels = [u0]
    for _ in range(derivatives):
        levels.append(_d_terms(levels[-1], nu1))
    offsets = sorted({j for t in levels for j in t})
    ys = _hermite_block(nu1, w, offsets, reflected, kummer)

    def ev(terms):
        return sum(P.polyval(z, coef) * ys[j] for j, coef in terms.items())

    u = [ev(t) for t in levels]
    gauss = np.exp(-0.5 * w * w)
    pref = xa ** (-7.0 / 6.0)
    G = gauss * u[0]
    out = [pref * G]
    if derivatives >= 1:
        G1 = gauss * (w * u[0] + u[1])
        zp = (2.0 / 3.0) * z / xa
        out.append(pref * (-(7.0 / 6.0) * G / xa + G1 * zp))
    if derivatives >= 2:
        G2 = gauss * ((w * w - 1.0) * u[0] + 2.0 * w * u[1] + u[2])
        zpp = -(2.0 / 9.0) * z / xa**2
        out.append(pref * ((91.0 / 36.0) * G / xa**2 - (7.0 / 3.0) * G1 * zp / xa + G2 * zp**2 + G1 * zpp))
    if np.ndim(x) == 0:
        out = [o[0] for o in out]
    return out if derivatives else out[0]


def fundamental_solution(ctx: SolutionContext, x):
    """psi_F on the context's branch (complex values)."""
    if ctx.branch is Branch.PRINCIPAL:
        ctx.params.require_bound()
        if ctx.energy <= ctx.params.v0:
            raise DomainError("the principal branch needs E > v0")
    return _evaluate(ctx, x)


def fundamental_solution_kummer(ctx: SolutionContext, x):
    """Same as :func:`fundamental_solution`, with every Hermite function
    expanded into its two Kummer functions (no recessive-sector switch)."""
    return _evaluate(ctx, x, kummer=True)


def fundamental_derivatives(ctx: SolutionContext, x):
    """(psi, psi', psi'') of the fundamental solution."""
    return _evaluate(ctx, x, derivatives=2)


def decaying_solution(ctx: SolutionContext, x, derivatives=0):
    """Principal-branch solution with reflected Hermite argument.

    Replacing ``H_mu(w)`` by ``(-1)^(mu - a - 1/2) H_mu(-w)`` keeps both the
    recurrence and the derivative rule, so the result is again a solution.
    It decays as x -> infinity, and its value at the origin is proportional
    to ``sqrt(2a) H_{a+1/2}(-sqrt(2a)) + H_{a+3/2}(-sqrt(2a))``.
    """
    if ctx.branch is not Branch.PRINCIPAL:
        raise ValueError("decaying solution is defined on the principal branch")
    return _evaluate(ctx, x, derivatives=derivatives, reflected=True)


def general_solution(g: GeneralSolution, x):
    out = 0.0
    if g.c1 != 0:
        out = out + g.c1 * fundamental_solution(g.principal, x)
    if g.c2 != 0:
        out = out + g.c2 * fundamental_solution(g.mirror, x)
    if np.ndim(out) == 0 and np.ndim(x) != 0:
        out = np.zeros(np.shape(x), dtype=complex)
    return complex(out) if np.ndim(x) == 0 else out


def general_derivatives(g: GeneralSolution, x):
    psi = np.zeros(np.shape(np.atleast_1d(x)), complex)
    d2 = np.zeros_like(psi)
    for coef, ctx in ((g.c1, g.principal), (g.c2, g.mirror)):
        if coef != 0:
            f, _, f2 = fundamental_derivatives(ctx, np.atleast_1d(x))
            psi = psi + coef * f
            d2 = d2 + coef * f2
    return psi, d2


def boundary_coefficient_ratio(ctx: SolutionContext) -> complex:
    """C2 / C1 making the general solution vanish at the origin."""
    a = ctx.spectral.a
    if not a > 0:
        raise DomainError("the boundary ratio needs a > 0")
    s = math.sqrt(2.0 * a)
    sm = cmath.sqrt(-2.0 * a)
    H = specfun.hermite_nu
    num = s * H(a + 0.5, s).value - H(a + 1.5, s).value
    den = sm * H(-a + 0.5, sm).value - H(-a + 1.5, sm).value
    if abs(den) < DENOMINATOR_TOL:
        raise DenominatorZero(f"boundary-ratio denominator vanishes at a={a}")
    return -math.exp(-2.0 * a) * num / den


def matched_general_solution(params: PhysicalParams, energy: float) -> GeneralSolution:
    ctx = SolutionContext(params, energy)
    return GeneralSolution(1.0, boundary_coefficient_ratio(ctx), params, energy)


def regular_series(params: PhysicalParams, energy: float, x, tol=1e-17, max_terms=400):
    """Frobenius solution x^(13/6) (1 + ...) regular at the origin.

    Coefficients of x^(13/6 + 2j/3) obey
    (2j/3)(10/3 + 2j/3) b_j = -k^2 b_{j-3} + q b_{j-4},
    k^2 = 2m(E - v0)/hbar^2, q = 2 m v1 / hbar^2.
    """
    xa = _check_x(x)
    k2 = 2.0 * params.m * (energy - params.v0) / params.hbar**2
    q = 2.0 * params.m * params.v1 / params.hbar**2
    t = np.cbrt(xa) ** 2
    b = [1.0, 0.0, 0.0]
    total = np.ones_like(xa)
    tj = np.ones_like(xa)
    for j in range(3, max_terms):
        bj = -k2 * b[j - 3] + (q * b[j - 4] if j >= 4 else 0.0)
        bj /= (2.0 * j / 3.0) * (10.0 / 3.0 + 2.0 * j / 3.0)
        b.append(bj)
        tj = t**j
        total = total + bj * tj
        if j > 8 and np.all(np.abs(b[-1] * tj) + np.abs(b[-2] * tj / t) < tol * np.abs(total)):
            break
    out = xa ** (13.0 / 6.0) * total
    return out[0] if np.ndim(x) == 0 else out


def matched_solution(params: PhysicalParams, energy: float, x, series_z: float = SERIES_Z):
    """General solution with C1 = 1 and C2 from the origin condition.

    Points with ``z < series_z`` use the regular series scaled to the closed
    form at ``z = series_z``; pass ``series_z=0`` to disable.
    """
    g = matched_general_solution(params, energy)
    xa = _check_x(x)
    out = np.empty(xa.shape, complex)
    sp = spectral_params(params, energy)
    x_sw = (series_z / math.sqrt(3.0 * sp.epsilon)) ** 1.5 if series_z > 0 else 0.0
    near = xa < x_sw
    if np.any(~near):
        out[~near] = general_solution(g, xa[~near])
    if np.any(near):
        scale = general_solution(g, x_sw) / regular_series(params, energy, x_sw)
        out[near] = scale * regular_series(params, energy, xa[near])
    return complex(out[0]) if np.ndim(x) == 0 else out


def wronskian(ctx: SolutionContext, x) -> complex:
    """W[psi_principal, psi_mirror] at x."""
    f, f1, _ = fundamental_derivatives(ctx, x)
    g, g1, _ = fundamental_derivatives(ctx.mirrored(), x)
    return f * g1 - f1 * g


def ode_residual(g: GeneralSolution, grid, energy: float | None = None) -> float:
    """max |psi'' + (2m/hbar^2)(E - V) psi| / max(1, |psi|) over the grid.

    ``energy`` overrides the E used in the equation (the solution itself is
    always built at ``g.energy``).
    """
    xa = _check_x(grid)
    if xa.size < 3:
        raise ValueError("need at least 3 grid points")
    p = g.params
    e = g.energy if energy is None else energy
    psi, d2 = general_derivatives(g, xa)
    res = d2 + 2.0 * p.m / p.hbar**2 * (e - potential_value(p, xa)) * psi
    return float(np.max(np.abs(res) / np.maximum(1.0, np.abs(psi))))
