"""Kummer 1F1 and non-integer-order Hermite functions, on top of a complex Gamma.

All routines accept Python scalars or numpy arrays (complex allowed) and
return an :class:`EvalResult`.  The value keeps the shape of the broadcast
input; scalar input gives a Python ``complex``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EPS = np.finfo(float).eps

# Lanczos approximation with g = 607/128 and 15 coefficients.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEF = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

POLE_TOL = 1e-14
KUMMER_TERMS = 500
KUMMER_RTOL = 1e-13


class SpecfunError(ArithmeticError):
    """Base class for special-function failures."""


class PoleError(SpecfunError):
    pass


class DegenerateB(SpecfunError):
    pass


class NoConvergence(SpecfunError):
    pass


@dataclass(frozen=True)
class EvalResult:
    value: complex | np.ndarray
    abs_error_estimate: float | np.ndarray
    terms_used: int


def _wrap(value, err, terms, scalar):
    if scalar:
        return EvalResult(complex(value.reshape(-1)[0]), float(np.max(err)), int(terms))
    return EvalResult(value, err, int(terms))


def _is_scalar(*args):
    return all(np.ndim(a) == 0 for a in args)


def _near_nonpositive_integer(z, tol=POLE_TOL):
    z = np.asarray(z, dtype=complex)
    r = np.round(z.real)
    return (np.abs(z.imag) <= tol) & (np.abs(z.real - r) <= tol) & (r <= 0)


def _lgamma_right(z):
    """log Gamma(z) for Re(z) >= 0.5 (principal branch of the Lanczos form)."""
    x = z - 1.0
    acc = np.full_like(z, _LANCZOS_COEF[0])
    for k in range(1, len(_LANCZOS_COEF)):
        acc = acc + _LANCZOS_COEF[k] / (x + k)
    t = x + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (x + 0.5) * np.log(t) - t + np.log(acc)


def _gamma_array(z):
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    left = z.real < 0.5
    right = ~left
    if np.any(right):
        out[right] = np.exp(_lgamma_right(z[right]))
    if np.any(left):
        zl = z[left]
        out[left] = np.pi / (np.sin(np.pi * zl) * np.exp(_lgamma_right(1.0 - zl)))
    return out


def rgamma(z):
    """Reciprocal gamma 1/Gamma(z), exactly zero at the poles."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    pole = _near_nonpositive_integer(z)
    ok = ~pole
    if np.any(ok):
        zo = z[ok]
        res = np.empty_like(zo)
        left = zo.real < 0.5
        if np.any(~left):
            res[~left] = np.exp(-_lgamma_right(zo[~left]))
        if np.any(left):
            zl = zo[left]
            res[left] = np.sin(np.pi * zl) * np.exp(_lgamma_right(1.0 - zl)) / np.pi
        out[ok] = res
    return out


def gamma(z) -> EvalResult:
    """Gamma function for complex argument.

    Lanczos approximation on ``Re(z) >= 1/2`` and the reflection formula
    elsewhere.  Raises :class:`PoleError` within ``1e-14`` of a
    non-positive integer.
    """
    scalar = _is_scalar(z)
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(_near_nonpositive_integer(za)):
        raise PoleError(f"Gamma has a pole at {z!r}")
    val = _gamma_array(za)
    # log-magnitude of the Lanczos exponent controls the rounding error
    err = np.abs(val) * EPS * (16.0 + np.abs(za) * np.log1p(np.abs(za)))
    return _wrap(val, err, len(_LANCZOS_COEF), scalar)


def _kummer_series(a, b, z, rtol, max_terms):
    """Plain Taylor sum of 1F1 on broadcast arrays.

    Returns (sum, abs_err, terms, converged_mask).
    """
    term = np.ones_like(z)
    total = np.ones_like(z)
    magnitude = np.ones(z.shape)
    done = np.zeros(z.shape, dtype=bool)
    tail = np.zeros(z.shape)
    k = 0
    terminating = _near_nonpositive_integer(a, tol=0.0)
    for k in range(max_terms):
        ratio = (a + k) / ((b + k) * (k + 1.0)) * z
        term = np.where(done, 0.0, term * ratio)
        total = total + term
        magnitude = magnitude + np.abs(term)
        # geometric tail bound once the term ratio has settled below 1/2
        nxt = np.abs((a + k + 1) / ((b + k + 1) * (k + 2.0)) * z)
        with np.errstate(divide="ignore", invalid="ignore"):
            bound = np.where(nxt < 0.5, np.abs(term) * nxt / (1.0 - nxt), np.inf)
        bound = np.where(term == 0, 0.0, bound)
        newly = ~done & (bound <= rtol * np.abs(total))
        if terminating.any():
            newly |= ~done & terminating & (term == 0)
        tail = np.where(newly, bound, tail)
        done |= newly
        if done.all():
            break
    err = tail + EPS * magnitude
    return total, err, k + 1, done


def kummer_1f1(a, b, z, *, rtol=KUMMER_RTOL, max_terms=KUMMER_TERMS) -> EvalResult:
    """Kummer confluent hypergeometric function 1F1(a; b; z).

    Taylor series with a running geometric tail bound.  For ``Re(z) < 0``
    the Kummer transformation ``e^z 1F1(b-a; b; -z)`` is applied first,
    unless ``a`` is a non-positive integer and the series terminates.
    """
    scalar = _is_scalar(a, b, z)
    a, b, z = np.broadcast_arrays(*(np.atleast_1d(np.asarray(v, dtype=complex)) for v in (a, b, z)))
    if np.any(_near_nonpositive_integer(b, tol=0.0)):
        raise DegenerateB("1F1 undefined for non-positive integer b")
    flip = (z.real < 0) & ~_near_nonpositive_integer(a, tol=0.0)
    aa = np.where(flip, b - a, a)
    zz = np.where(flip, -z, z)
    total, err, terms, done = _kummer_series(aa, b, zz, rtol, max_terms)
    if not done.all():
        bad = np.flatnonzero(~done)[0]
        raise NoConvergence(
            f"1F1({a.flat[bad]}; {b.flat[bad]}; {z.flat[bad]}) not converged in {max_terms} terms"
        )
    scale = np.where(flip, np.exp(z), 1.0)
    return _wrap(total * scale, err * np.abs(scale), terms, scalar)


# ---------------------------------------------------------------------------
# Hermite functions
# ---------------------------------------------------------------------------

# Beyond this value of Re(z^2) (with Re z > 0) the two Kummer terms cancel
# to a recessive result and lose about Re(z^2)/ln(10) digits.
RECESSIVE_THRESHOLD = 2.0


def _hermite_kummer(nu, z):
    """H_nu(z) from the two-Kummer representation, arrays in, arrays out."""
    z2 = z * z
    f1 = kummer_1f1(-nu / 2.0, 0.5, z2)
    f2 = kummer_1f1((1.0 - nu) / 2.0, 1.5, z2)
    r1 = rgamma((1.0 - nu) / 2.0)
    r2 = rgamma(-nu / 2.0)
    pref = np.sqrt(np.pi) * np.exp(nu * math.log(2.0))
    t1 = f1.value * r1
    t2 = 2.0 * z * f2.value * r2
    val = pref * (t1 - t2)
    err = np.abs(pref) * (
        np.abs(r1) * f1.abs_error_estimate
        + 2.0 * np.abs(z) * np.abs(r2) * f2.abs_error_estimate
        + 4 * EPS * (np.abs(t1) + np.abs(t2))
    )
    return val, err, f1.terms_used + f2.terms_used


def _hermite_asymptotic(nu, z, max_terms=200):
    """(2z)^nu 2F0(-nu/2, (1-nu)/2; ; -1/z^2), truncated at the smallest term."""
    a1 = -nu / 2.0
    a2 = (1.0 - nu) / 2.0
    w = -1.0 / (z * z)
    term = np.ones_like(z)
    total = np.ones_like(z)
    last = np.full(z.shape, np.inf)
    active = np.ones(z.shape, dtype=bool)
    for k in range(max_terms):
        nxt = term * (a1 + k) * (a2 + k) / (k + 1.0) * w
        grow = np.abs(nxt) >= last
        active &= ~grow & (nxt != 0)
        term = np.where(active, nxt, 0.0)
        total = total + term
        last = np.where(active, np.abs(nxt), last)
        if not active.any():
            break
    scale = np.exp(nu * np.log(2.0 * z))
    return total * scale, np.abs(scale) * (last + EPS * np.abs(total)), k + 1


def _taylor_step(nu, c, y, dy, h, n_terms=30):
    """Advance the Hermite equation y'' - 2 z y' + 2 nu y = 0 from c to c + h."""
    ck0, ck1 = y, dy
    val = ck0 + ck1 * h
    der = ck1.copy()
    hp = h.copy()  # h^(k+1) for the derivative sum
    hk = h * h
    prev, cur = ck0, ck1
    for k in range(n_terms):
        nxt = (2.0 * c * (k + 1) * cur + 2.0 * (k - nu) * prev) / ((k + 1.0) * (k + 2.0))
        val = val + nxt * hk
        der = der + (k + 2) * nxt * hp
        hk = hk * h
        hp = hp * h
        prev, cur = cur, nxt
    return val, der


def _hermite_recessive(nu, z):
    """H_nu(z) for Re z > 0, |arg z| < pi/4.

    Starts from the asymptotic expansion on the same ray far out and
    integrates the Hermite equation inward; the wanted solution dominates
    in that direction, so the march is stable.
    """
    radius = max(9.0, abs(nu) + 4.0)
    mod = np.abs(z)
    z0 = z * (np.maximum(radius, mod) / mod)
    y, ey, _ = _hermite_asymptotic(nu, z0)
    ym, eym, _ = _hermite_asymptotic(nu - 1.0, z0)
    dy = 2.0 * nu * ym
    span = np.abs(z0 - z)
    n_steps = int(np.ceil(np.max(span * (1.5 * np.abs(z0) + 2.0 * math.sqrt(abs(nu) + 1.0)))))
    n_steps = max(n_steps, 1)
    h = (z - z0) / n_steps
    c = z0.copy()
    for _ in range(n_steps):
        y, dy = _taylor_step(nu, c, y, dy, h)
        c = c + h
    # oscillatory region: gauge rounding against the (2z)^nu envelope, not |y|
    envelope = np.maximum(np.abs(y), np.abs(np.exp(nu * np.log(2.0 * z))))
    err = np.abs(ey) / np.maximum(np.abs(np.exp(nu * np.log(2.0 * z0))), 1e-300) * envelope
    return y, err + n_steps * 4 * EPS * envelope, n_steps


def hermite_nu(order, z) -> EvalResult:
    """Hermite function H_nu(z) of arbitrary complex order.

    Built from two Kummer functions and two reciprocal gammas::

        H_nu(z) = sqrt(pi) 2^nu [ 1F1(-nu/2; 1/2; z^2) / Gamma((1-nu)/2)
                                  - 2z 1F1((1-nu)/2; 3/2; z^2) / Gamma(-nu/2) ]

    A reciprocal gamma at a pole is taken as zero, so integer orders reduce
    to the Hermite polynomials.  In the sector ``|arg z| < pi/4`` with
    ``Re(z^2) > 2`` the two terms cancel to the recessive solution; there
    the value is also obtained from the large-``z`` expansion continued
    inward along the Hermite equation, and whichever route carries the
    smaller error estimate is kept.
    """
    nu = complex(order)
    scalar = np.ndim(z) == 0
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    val = np.empty_like(za)
    err = np.empty(za.shape)
    rec = (za.real > 0) & ((za * za).real > RECESSIVE_THRESHOLD) & (np.abs(za.imag) < za.real)
    terms = 0
    # the Kummer series is only attempted where it converges in budget
    kum = ~rec | (np.abs(za) ** 2 <= 150.0)
    val[:] = np.nan
    err[:] = np.inf
    if np.any(kum):
        v, e, terms = _hermite_kummer(nu, za[kum])
        val[kum], err[kum] = v, e
    if np.any(rec):
        v, e, t = _hermite_recessive(nu, za[rec])
        better = e < err[rec]
        idx = np.flatnonzero(rec)[better]
        val[idx], err[idx] = v[better], e[better]
        terms = max(terms, t)
    return _wrap(val, err, terms, scalar)


def hermite_nu_derivative(order, z) -> EvalResult:
    """d/dz H_nu(z) = 2 nu H_{nu-1}(z)."""
    nu = complex(order)
    r = hermite_nu(nu - 1.0, z)
    return EvalResult(2.0 * nu * r.value, abs(2.0 * nu) * r.abs_error_estimate, r.terms_used)
