"""The x^(2/3) well with a fixed centrifugal barrier and its parameter maps.

    V(x) = 91 hbar^2 / (72 m x^2) + v0 + v1 x^(2/3)

Energies enter the closed-form solution through the pair ``(epsilon, a)``::

    epsilon = sqrt(m v1 / (2 hbar^2)),   a = 3 m^2 (E - v0)^2 / (32 hbar^4 epsilon^3)
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

# The barrier strength is what makes the problem solvable; keep it exact.
CENTRIFUGAL_COEFFICIENT = Fraction(91, 72)
EFFECTIVE_L = Fraction(7, 6)
MASLOV_INDEX = (2 * EFFECTIVE_L - 1) / 4

_CF = float(CENTRIFUGAL_COEFFICIENT)


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


@dataclass(frozen=True)
class PhysicalParams:
    m: float = 1.0
    hbar: float = 1.0
    v0: float = 0.0
    v1: float = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise DomainError(f"mass must be positive, got {self.m}")
        if not self.hbar > 0:
            raise DomainError(f"hbar must be positive, got {self.hbar}")

    @property
    def v_cf(self) -> float:
        """Strength of the x^-2 term, 91 hbar^2 / (72 m)."""
        return _CF * self.hbar**2 / self.m

    def require_bound(self):
        if not self.v1 > 0:
            raise DomainError(f"bound states need v1 > 0, got v1={self.v1}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PhysicalParams":
        return cls(**{k: float(d[k]) for k in ("m", "hbar", "v0", "v1") if k in d})


REFERENCE_PRESET = PhysicalParams(m=1.0, hbar=1.0, v0=0.0, v1=1.0)


@dataclass(frozen=True)
class SpectralParams:
    epsilon: float
    a: float


def potential_value(p: PhysicalParams, x):
    """V(x) for x > 0; works elementwise on arrays."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("the potential is defined for x > 0 only")
    v = p.v_cf / xa**2 + p.v0 + p.v1 * np.cbrt(xa) ** 2
    return float(v) if np.ndim(x) == 0 else v


def potential_minimum(p: PhysicalParams) -> float:
    """Location of the minimum of V for v1 > 0.

    Setting V'(x) = -2 v_cf x^-3 + (2/3) v1 x^-1/3 to zero gives
    x^(8/3) = 3 v_cf / v1.
    """
    p.require_bound()
    return (3.0 * p.v_cf / p.v1) ** 0.375


def epsilon(p: PhysicalParams) -> float:
    p.require_bound()
    return math.sqrt(p.m * p.v1 / (2.0 * p.hbar**2))


def spectral_params(p: PhysicalParams, e: float) -> SpectralParams:
    eps = epsilon(p)
    a = 3.0 * p.m**2 * (e - p.v0) ** 2 / (32.0 * p.hbar**4 * eps**3)
    return SpectralParams(epsilon=eps, a=a)


def energy_from_a(p: PhysicalParams, a: float) -> float:
    """Inverse of :func:`spectral_params` on the branch E >= v0."""
    if a < 0:
        raise DomainError(f"a must be non-negative, got {a}")
    eps = epsilon(p)
    return p.v0 + math.sqrt(32.0 * p.hbar**4 * eps**3 * a / (3.0 * p.m**2))


def turning_points(p: PhysicalParams, e: float) -> tuple[float, float]:
    """Inner and outer classical turning points, V(x) = e."""
    from scipy.optimize import brentq

    xm = potential_minimum(p)
    if e <= potential_value(p, xm):
        raise DomainError("energy below the bottom of the well")
    f = lambda x: potential_value(p, x) - e
    lo = xm
    while f(lo) < 0:
        lo *= 0.5
    hi = xm
    while f(hi) < 0:
        hi *= 2.0
    return brentq(f, lo, xm, xtol=1e-14), brentq(f, xm, hi, xtol=1e-14)
