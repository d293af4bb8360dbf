import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize_scalar

from heunwell.potential import (
    CENTRIFUGAL_COEFFICIENT,
    EFFECTIVE_L,
    MASLOV_INDEX,
    REFERENCE_PRESET,
    DomainError,
    PhysicalParams,
    energy_from_a,
    epsilon,
    potential_minimum,
    potential_value,
    spectral_params,
    turning_points,
)


def test_potential_values():
    assert potential_value(REFERENCE_PRESET, 1.0) == pytest.approx(163 / 72, rel=1e-15)
    assert potential_value(PhysicalParams(v0=5, v1=0), 2.0) == pytest.approx(5 + 91 / 288, rel=1e-15)


def test_potential_vectorized_and_domain():
    x = np.array([0.5, 1.0, 2.0])
    assert np.allclose(potential_value(REFERENCE_PRESET, x), [potential_value(REFERENCE_PRESET, v) for v in x])
    for bad in (0.0, -1.0):
        with pytest.raises(DomainError):
            potential_value(REFERENCE_PRESET, bad)


def test_minimum_matches_numerical_minimization():
    res = minimize_scalar(lambda x: potential_value(REFERENCE_PRESET, x), bounds=(0.1, 10), method="bounded",
                          options={"xatol": 1e-12})
    xm = potential_minimum(REFERENCE_PRESET)
    assert xm == pytest.approx(res.x, rel=1e-6)
    # stationarity: -2 (91/72) x^-3 + (2/3) x^-1/3 = 0
    assert -2 * 91 / 72 * xm**-3 + 2 / 3 * xm ** (-1 / 3) == pytest.approx(0, abs=1e-14)


def test_exact_constants():
    assert CENTRIFUGAL_COEFFICIENT == Fraction(91, 72)
    assert EFFECTIVE_L * (EFFECTIVE_L + 1) == Fraction(91, 36)
    assert MASLOV_INDEX == Fraction(1, 3)


def test_spectral_parameters():
    assert epsilon(REFERENCE_PRESET) == pytest.approx(math.sqrt(0.5), rel=1e-15)
    assert spectral_params(REFERENCE_PRESET, 2.0).a == pytest.approx(12 / (32 * 0.5**1.5), rel=1e-14)
    assert spectral_params(PhysicalParams(v0=3.0), 3.0).a == 0
    assert energy_from_a(REFERENCE_PRESET, 0) == 0
    assert energy_from_a(REFERENCE_PRESET, 1.0606601717798212) == pytest.approx(2.0, rel=1e-14)
    with pytest.raises(DomainError):
        energy_from_a(REFERENCE_PRESET, -0.1)
    with pytest.raises(DomainError):
        spectral_params(PhysicalParams(v1=0.0), 2.0)


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(-5, 5), st.floats(0.1, 10), st.floats(1e-3, 50))
def test_energy_round_trip(m, hbar, v0, v1, de):
    p = PhysicalParams(m=m, hbar=hbar, v0=v0, v1=v1)
    e = v0 + de
    assert energy_from_a(p, spectral_params(p, e).a) == pytest.approx(e, rel=1e-12)


def test_a_increasing_in_energy():
    e = np.linspace(0.01, 20, 200)
    a = [spectral_params(REFERENCE_PRESET, v).a for v in e]
    assert np.all(np.diff(a) > 0)


def test_confinement_and_turning_points():
    assert potential_value(REFERENCE_PRESET, 1e-4) > 1e7
    assert potential_value(REFERENCE_PRESET, 1e6) > 1e3
    lo, hi = turning_points(REFERENCE_PRESET, 3.0)
    assert lo < potential_minimum(REFERENCE_PRESET) < hi
    assert potential_value(REFERENCE_PRESET, lo) == pytest.approx(3.0)
    assert potential_value(REFERENCE_PRESET, hi) == pytest.approx(3.0)


def test_invalid_params_and_serialization():
    with pytest.raises(DomainError):
        PhysicalParams(m=0)
    with pytest.raises(DomainError):
        PhysicalParams(v1=-1).require_bound()
    p = PhysicalParams(m=2, hbar=0.5, v0=-1, v1=3)
    assert PhysicalParams.from_dict(p.to_dict()) == p
