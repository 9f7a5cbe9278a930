import math

import numpy as np
import pytest

from minheat import (CSL, DP, GRW, InfiniteRateError, InvalidProfileError,
                     ModelParams, RadialProfile, UnsupportedKindError,
                     dirichlet_energy, dp_energy, dp_energy_coulomb,
                     evaluate_heating, fourier_radial, make_closed_form,
                     physical_heating_rate, random_feasible_profile, rescale,
                     sqrt_profile)
from minheat.functionals import DEFAULT_K_GRID, radial_fourier_values

from conftest import EXPECTED_GRADIENT, EXPECTED_SQUARE


def test_dirichlet_energy_values(gauss, cslopt, dpopt):
    assert dirichlet_energy(sqrt_profile(gauss)) == pytest.approx(0.375, rel=1e-10)
    assert dirichlet_energy(sqrt_profile(cslopt)) == pytest.approx(7 / 12, rel=1e-10)
    for name, p in (("gaussian", gauss), ("csl-optimal", cslopt), ("dp-optimal", dpopt)):
        assert dirichlet_energy(p) == pytest.approx(EXPECTED_GRADIENT[name], rel=1e-10)


def test_dp_energy_values(gauss, cslopt, dpopt):
    for name, p in (("gaussian", gauss), ("csl-optimal", cslopt), ("dp-optimal", dpopt)):
        assert dp_energy(p) == pytest.approx(EXPECTED_SQUARE[name], rel=1e-10)


def test_dp_energy_coulomb_cross_validates(gauss, cslopt, dpopt):
    for name, p in (("gaussian", gauss), ("csl-optimal", cslopt), ("dp-optimal", dpopt)):
        direct = dp_energy_coulomb(p, n_panels=64)
        assert direct == pytest.approx(dp_energy(p), rel=1e-3)


def test_dp_energy_coulomb_zero_profile():
    grid = np.linspace(0.0, 2.0, 40)
    zero = RadialProfile(grid, np.zeros_like(grid))
    assert dp_energy_coulomb(zero, n_panels=16) == 0.0


def test_fourier_gaussian_pointwise(gauss):
    ft = fourier_radial(gauss)
    exact = (2 * np.pi) ** -1.5 * np.exp(-ft.k**2 / 2)
    assert np.abs(ft.values - exact).max() < 1e-10
    assert ft.values[0] == pytest.approx((2 * np.pi) ** -1.5, rel=1e-12)


def test_fourier_default_grid():
    assert DEFAULT_K_GRID[0] == 0.0
    assert DEFAULT_K_GRID[1] == pytest.approx(1e-3)
    assert DEFAULT_K_GRID[-1] == pytest.approx(50.0)
    assert DEFAULT_K_GRID.size == 513


def test_fourier_linearity(gauss, cslopt):
    # compare on one common sampled representation so the transform is the
    # same linear map for all three inputs
    k = np.geomspace(1e-2, 20.0, 50)
    va = gauss.values
    vb = cslopt.evaluate(gauss.grid)
    pa = RadialProfile(gauss.grid, va, panel_grid=gauss.panel_grid)
    pb = RadialProfile(gauss.grid, vb, panel_grid=gauss.panel_grid)
    combo = RadialProfile(gauss.grid, 0.3 * va + 0.7 * vb, panel_grid=gauss.panel_grid)
    fa = radial_fourier_values(pa, k)
    fb = radial_fourier_values(pb, k)
    fc = radial_fourier_values(combo, k)
    assert np.allclose(fc, 0.3 * fa + 0.7 * fb, rtol=1e-10, atol=1e-14)


def test_parseval_identity(gauss, cslopt):
    # (1/2) int d^3k k^2 |g~|^2 equals the gradient-form energy
    for p in (gauss, cslopt):
        k = np.linspace(1e-4, 60.0, 30000)
        ft = radial_fourier_values(p, k)
        lhs = 0.5 * np.trapezoid(4 * np.pi * k**4 * ft**2, k)
        assert lhs == pytest.approx(dirichlet_energy(p), rel=1e-5)


def test_evaluate_heating_matrix(gauss, cslopt, dpopt):
    cases = {
        (GRW, "gauss"): (gauss, 0.375, False),
        (GRW, "cslopt"): (cslopt, 7 / 12, False),
        (GRW, "dpopt"): (dpopt, None, True),
        (CSL, "cslopt"): (cslopt, EXPECTED_GRADIENT["csl-optimal"], False),
        (DP, "dpopt"): (dpopt, EXPECTED_SQUARE["dp-optimal"], False),
    }
    for (kind, _), (profile, expected, divergent) in cases.items():
        hv = evaluate_heating(kind, profile)
        assert hv.divergent is divergent
        if not divergent:
            assert hv.geometric_value == pytest.approx(expected, rel=1e-8)
            assert hv.est_error < 1e-8


def test_heating_serialization(gauss):
    hv = evaluate_heating(CSL, gauss)
    d = hv.to_dict()
    assert set(d) == {"kind", "geometric_value", "divergent", "grid_points", "est_error"}
    assert d["divergent"] is False
    hv2 = evaluate_heating(GRW, make_closed_form("dp-optimal"))
    assert hv2.to_dict()["geometric_value"] is None


def test_heating_rejects_unknown_kind(gauss):
    with pytest.raises(UnsupportedKindError):
        evaluate_heating("bogus", gauss)


def test_physical_rates(gauss, cslopt, dpopt):
    unit = ModelParams()
    hv = evaluate_heating(CSL, cslopt)
    assert physical_heating_rate(CSL, hv, unit) == pytest.approx(hv.geometric_value)
    hv_grw = evaluate_heating(GRW, gauss)
    assert physical_heating_rate(GRW, hv_grw, unit) == pytest.approx(0.375, rel=1e-9)
    hv_dp = evaluate_heating(DP, dpopt)
    assert physical_heating_rate(DP, hv_dp, unit) == pytest.approx(
        hv_dp.geometric_value)
    scaled = ModelParams(gamma_csl=2.0, m0=0.5, total_mass=3.0, hbar=2.0)
    assert physical_heating_rate(CSL, hv, scaled) == pytest.approx(
        3.0 / 0.25 * 2.0 * 4.0 * hv.geometric_value)
    divergent = evaluate_heating(GRW, make_closed_form("dp-optimal"))
    with pytest.raises(InfiniteRateError):
        physical_heating_rate(GRW, divergent, unit)


def test_scaling_laws(gauss, cslopt):
    alpha = 1.7
    assert dirichlet_energy(rescale(gauss, alpha)) == pytest.approx(
        alpha**5 * dirichlet_energy(gauss), rel=1e-10)
    assert dirichlet_energy(sqrt_profile(rescale(gauss, alpha))) == pytest.approx(
        alpha**2 * dirichlet_energy(sqrt_profile(gauss)), rel=1e-10)
    assert dp_energy(rescale(cslopt, alpha)) == pytest.approx(
        alpha**3 * dp_energy(cslopt), rel=1e-10)


def test_convexity_chord():
    rng = np.random.default_rng(21)
    for _ in range(6):
        f = random_feasible_profile(rng)
        h = random_feasible_profile(rng)
        hv = h.evaluate(f.grid)
        for lam in (0.25, 0.5, 0.75):
            combo = RadialProfile(f.grid, lam * f.values + (1 - lam) * hv,
                                  panel_grid=f.panel_grid)
            lhs = dirichlet_energy(combo)
            rhs = lam * dirichlet_energy(f) + (1 - lam) * dirichlet_energy(
                RadialProfile(f.grid, hv, panel_grid=f.panel_grid))
            assert lhs <= rhs + 1e-10


def test_negative_values_rejected():
    grid = np.linspace(0.0, 2.0, 20)
    with pytest.raises(InvalidProfileError):
        RadialProfile(grid, np.linspace(1.0, -0.1, 20))
