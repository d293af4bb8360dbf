import math

import mpmath as mp
import numpy as np
import pytest

from heunwell import closedform as cf
from heunwell.potential import REFERENCE_PRESET, DomainError, PhysicalParams, spectral_params
from heunwell.spectrum import exact_roots, solve_levels_exact

P = REFERENCE_PRESET
CASES = [(1.0, 2.0), (1.0, 5.0), (4.0, 3.0)]


def psi_f_mpmath(p, e, x, mirror=False):
    """Fundamental solution assembled from mpmath Hermite functions."""
    mp.mp.dps = 30
    eps = mp.sqrt(p.m * p.v1 / (2 * p.hbar**2))
    a = 3 * p.m**2 * (e - p.v0) ** 2 / (32 * p.hbar**4 * eps**3)
    if mirror:
        eps, a = -eps, -a
    s = mp.sqrt(2 * a)
    z = mp.sqrt(3 * eps) * mp.mpf(x) ** (mp.mpf(2) / 3)
    w = s - z
    u = (s * (1 - 2 * z**2) - z * (3 - 2 * z**2)) * mp.hermite(a + 0.5, w) - (1 - z**2) * mp.hermite(a + 1.5, w)
    return complex(mp.mpf(x) ** (-mp.mpf(7) / 6) * mp.exp(-w**2 / 2) * u)


def test_z_of_x():
    sp = spectral_params(P, 2.0)
    assert cf.z_of_x(sp, 1.0) == pytest.approx(math.sqrt(3 * math.sqrt(0.5)), rel=1e-14)
    assert cf.z_of_x(sp, 8.0) == pytest.approx(4 * math.sqrt(3 * math.sqrt(0.5)), rel=1e-14)
    assert cf.z_of_x(sp, 1e-30) < 1e-19
    with pytest.raises(DomainError):
        cf.z_of_x(sp, 0.0)


@pytest.mark.parametrize("v1, e", CASES)
@pytest.mark.parametrize("mirror", [False, True])
def test_fundamental_solution_against_mpmath(v1, e, mirror):
    p = PhysicalParams(v1=v1)
    ctx = cf.SolutionContext(p, e, cf.Branch.MIRROR if mirror else cf.Branch.PRINCIPAL)
    for x in (0.3, 1.0, 2.7, 5.0):
        ref = psi_f_mpmath(p, e, x, mirror)
        assert abs(cf.fundamental_solution(ctx, x) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_reference_value_at_unit_x():
    ctx = cf.SolutionContext(P, 2.0)
    assert cf.fundamental_solution(ctx, 1.0) == pytest.approx(1.1662163161977186, rel=1e-12)


@pytest.mark.parametrize("v1, e", CASES)
def test_ode_residual_of_fundamental_solution(v1, e):
    p = PhysicalParams(v1=v1)
    grid = np.linspace(0.2, 5, 50)
    assert cf.ode_residual(cf.GeneralSolution(1, 0, p, e), grid) <= 1e-6
    assert cf.ode_residual(cf.GeneralSolution(0, 1, p, e), grid) <= 1e-6


def test_residual_detects_wrong_energy():
    g = cf.GeneralSolution(1, 0, P, 2.0)
    grid = np.linspace(0.2, 5, 50)
    assert cf.ode_residual(g, grid, energy=2.0 + 1e-3) > 1e-4
    assert cf.ode_residual(cf.GeneralSolution(0, 0, P, 2.0), grid) == 0


def test_second_derivative_matches_finite_difference():
    ctx = cf.SolutionContext(P, 3.1)
    x = np.linspace(0.5, 4, 8)
    h = 1e-4
    f, f1, f2 = cf.fundamental_derivatives(ctx, x)
    fp = cf.fundamental_solution(ctx, x + h)
    fm = cf.fundamental_solution(ctx, x - h)
    assert np.allclose(f1, (fp - fm) / (2 * h), rtol=1e-7, atol=1e-9)
    assert np.allclose(f2, (fp - 2 * f + fm) / h**2, rtol=1e-5, atol=1e-6)


@pytest.mark.parametrize("v1, e", CASES)
def test_branches_independent(v1, e):
    ctx = cf.SolutionContext(PhysicalParams(v1=v1), e)
    assert abs(cf.wronskian(ctx, 1.0)) > 1e-8


def test_wronskian_constant_in_x():
    ctx = cf.SolutionContext(P, 2.0)
    w = [cf.wronskian(ctx, x) for x in (0.4, 1.0, 2.5)]
    assert np.allclose(w, w[0], rtol=1e-9)


@pytest.mark.parametrize("v1, e", CASES)
def test_kummer_form_equals_hermite_form(v1, e):
    p = PhysicalParams(v1=v1)
    for branch in cf.Branch:
        ctx = cf.SolutionContext(p, e, branch)
        x = np.linspace(0.2, 3.0, 15)
        h = cf.fundamental_solution(ctx, x)
        k = cf.fundamental_solution_kummer(ctx, x)
        assert np.all(np.abs(h - k) <= 1e-11 * np.maximum(np.abs(h), 1.0))


def test_general_solution_linearity_and_degenerate_cases():
    x = np.linspace(0.3, 4, 12)
    one = cf.general_solution(cf.GeneralSolution(1, 0, P, 2.0), x)
    two = cf.general_solution(cf.GeneralSolution(0, 1, P, 2.0), x)
    both = cf.general_solution(cf.GeneralSolution(2, 3, P, 2.0), x)
    assert np.allclose(one, cf.fundamental_solution(cf.SolutionContext(P, 2.0), x), rtol=0, atol=0)
    assert np.allclose(both, 2 * one + 3 * two, rtol=1e-13, atol=0)
    assert np.all(cf.general_solution(cf.GeneralSolution(0, 0, P, 2.0), x) == 0)


def test_origin_divergence_bounded_by_prefactor():
    # |psi_F| x^(7/6) stays finite as x -> 0
    ctx = cf.SolutionContext(P, 2.0)
    x = np.array([1e-6, 1e-5, 1e-4])
    scaled = np.abs(cf.fundamental_solution(ctx, x)) * x ** (7 / 6)
    assert np.all(np.isfinite(scaled)) and np.ptp(scaled) / scaled.max() < 1e-2
    slope = np.polyfit(np.log(x), np.log(np.abs(cf.fundamental_solution(ctx, x))), 1)[0]
    assert slope == pytest.approx(-7 / 6, abs=0.02)


def test_boundary_ratio_independent_of_c1():
    ctx = cf.SolutionContext(P, 2.5)
    r = cf.boundary_coefficient_ratio(ctx)
    x = np.linspace(0.5, 3, 5)
    g1 = cf.general_solution(cf.GeneralSolution(1, r, P, 2.5), x)
    g7 = cf.general_solution(cf.GeneralSolution(7 - 2j, (7 - 2j) * r, P, 2.5), x)
    assert np.allclose(g7, (7 - 2j) * g1, rtol=1e-13)


def test_half_integer_root_gives_zero_wavefunction():
    from heunwell.potential import energy_from_a

    e = energy_from_a(P, 0.5)
    g = cf.matched_general_solution(P, e)
    x = np.linspace(0.05, 8, 200)
    psi = cf.general_solution(g, x)
    # the principal solution itself vanishes here and c2 is rounding noise
    assert abs(g.c2) < 1e-12
    assert np.max(np.abs(psi)) <= 1e-10 * np.max(np.abs(cf.fundamental_solution(g.mirror, x)))


def test_matched_solution_vanishes_at_origin_at_a_root():
    lvl = solve_levels_exact(P, 1)[0]
    x = np.linspace(0.05, 6, 300)
    peak = np.max(np.abs(cf.matched_solution(P, lvl.e_exact, x)))
    assert abs(cf.matched_solution(P, lvl.e_exact, 1e-6)) < 1e-8 * peak


@pytest.mark.parametrize("series_z", [cf.SERIES_Z, 0.0])
def test_near_origin_exponent(series_z):
    for lvl in solve_levels_exact(P, 3):
        x = np.geomspace(1e-3, 1e-2, 20)
        psi = np.abs(cf.matched_solution(P, lvl.e_exact, x, series_z=series_z))
        slope = np.polyfit(np.log(x), np.log(psi), 1)[0]
        assert slope == pytest.approx(13 / 6, abs=0.02)


def test_regular_series_solves_the_equation():
    e = 2.7
    x = np.linspace(0.05, 0.6, 40)
    h = 1e-4
    f = cf.regular_series(P, e, x)
    f2 = (cf.regular_series(P, e, x + h) - 2 * f + cf.regular_series(P, e, x - h)) / h**2
    from heunwell.potential import potential_value

    res = f2 + 2 * (e - potential_value(P, x)) * f
    assert np.max(np.abs(res) / np.max(np.abs(f))) < 1e-5


def test_decaying_solution_matches_matched_solution_at_root():
    lvl = solve_levels_exact(P, 2)[1]
    ctx = cf.SolutionContext(P, lvl.e_exact)
    x = np.linspace(0.8, 3.0, 9)
    ratio = cf.matched_solution(P, lvl.e_exact, x) / cf.decaying_solution(ctx, x)
    assert np.allclose(ratio, ratio[0], rtol=1e-8)


def test_principal_branch_domain():
    with pytest.raises(DomainError):
        cf.fundamental_solution(cf.SolutionContext(P, -1.0), 1.0)
    with pytest.raises(DomainError):
        cf.fundamental_solution(cf.SolutionContext(PhysicalParams(v1=-1.0), 2.0), 1.0)
