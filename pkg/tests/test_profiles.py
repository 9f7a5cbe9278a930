import math

import numpy as np
import pytest

from minheat import (ClosedFormProfile, DomainTruncationError, InvalidProfileError,
                     InvalidScaleError, MassDensity, RadialProfile,
                     check_constraints, decreasing_rearrangement, load_profile,
                     make_closed_form, random_feasible_profile, rescale,
                     save_profile)
from minheat.grids import RadialGrid


@pytest.mark.parametrize("kind", ["gaussian", "csl-optimal", "dp-optimal"])
def test_closed_forms_satisfy_constraints(kind):
    p = make_closed_form(kind)
    norm, variance = check_constraints(p)
    assert norm == pytest.approx(1.0, rel=1e-12)
    assert variance == pytest.approx(3.0, rel=1e-12)


def test_constraints_scale_with_smearing_length():
    p = make_closed_form(ClosedFormProfile("csl-optimal", r_c=2.0), n_points=201)
    norm, variance = check_constraints(p)
    assert norm == pytest.approx(1.0, rel=1e-10)
    assert variance == pytest.approx(12.0, rel=1e-10)


@pytest.mark.parametrize("kind", ["gaussian", "csl-optimal", "dp-optimal"])
def test_constraints_under_grid_refinement(kind):
    for n in (81, 161, 321):
        p = make_closed_form(kind, n_points=n)
        norm, variance = check_constraints(p)
        assert abs(norm - 1.0) < 1e-6
        assert abs(variance - 3.0) < 3e-6


def test_support_radii():
    assert make_closed_form("csl-optimal").support_radius == pytest.approx(3.0)
    assert make_closed_form("dp-optimal").support_radius == pytest.approx(math.sqrt(7.0))
    assert make_closed_form("gaussian").support_radius is None


def test_gaussian_center_value():
    p = make_closed_form("gaussian")
    assert p.evaluate(0.0) == pytest.approx((2 * np.pi) ** -1.5, rel=1e-14)


def test_truncated_domain_rejected():
    with pytest.raises(DomainTruncationError):
        make_closed_form("csl-optimal", r_max=2.0)


def test_scaled_values_scale_norm():
    p = make_closed_form("gaussian")
    doubled = RadialProfile(p.grid, 2.0 * p.values, panel_grid=p.panel_grid)
    norm, _ = check_constraints(doubled)
    assert norm == pytest.approx(2.0, rel=1e-12)


def test_profile_validation():
    with pytest.raises(InvalidProfileError):
        RadialProfile([0.0, 1.0], [1.0, -0.5])
    with pytest.raises(InvalidProfileError):
        RadialProfile([0.5, 1.0], [1.0, 0.5])  # grid must start at zero
    with pytest.raises(InvalidProfileError):
        RadialProfile([0.0, 1.0, 1.0], [1.0, 0.5, 0.2])
    with pytest.raises(InvalidProfileError):
        RadialProfile([0.0, 1.0, 2.0], [1.0, 0.5, 0.2], support_radius=1.5)


def test_rescale_identity_and_errors():
    p = make_closed_form("gaussian")
    assert rescale(p, 1.0) is p
    with pytest.raises(InvalidScaleError):
        rescale(p, 0.0)
    with pytest.raises(InvalidScaleError):
        rescale(p, -2.0)


def test_rescale_gaussian_family_closure():
    p = make_closed_form("gaussian")
    half = rescale(p, 2.0)
    norm, variance = check_constraints(half)
    assert norm == pytest.approx(1.0, rel=1e-12)
    assert variance == pytest.approx(0.75, rel=1e-12)
    narrow = ClosedFormProfile("gaussian", r_c=0.5)
    rq = np.linspace(0.0, 3.0, 50)
    assert np.allclose(half.evaluate(rq), narrow(rq), rtol=1e-12)


def test_rescale_support_shrinks():
    p = make_closed_form("csl-optimal")
    shrunk = rescale(p, 3.0)
    assert shrunk.support_radius == pytest.approx(1.0, rel=1e-14)
    # numeric support agrees with R / alpha
    nz = shrunk.grid[shrunk.values > 1e-12 * shrunk.values.max()]
    assert nz.max() <= 1.0 + 1e-12


def test_rescale_roundtrip():
    p = make_closed_form("csl-optimal")
    back = rescale(rescale(p, 2.3), 1 / 2.3)
    assert np.allclose(back.values, p.values, atol=1e-14)
    assert np.allclose(back.grid, p.grid, rtol=1e-14)


def test_rearrangement_fixes_decreasing_input():
    p = make_closed_form("gaussian")
    out = decreasing_rearrangement(p)
    assert np.abs(out.values - p.values).max() < 2e-5 * p.values.max()


def test_rearrangement_of_shell_bump():
    grid = RadialGrid.for_domain(6.0, n_points=200)
    shell = RadialProfile.from_callable(
        lambda r: np.exp(-((np.asarray(r) - 2.0) ** 2) / 0.18), grid)
    out = decreasing_rearrangement(shell)
    assert np.all(np.diff(out.values) <= 1e-12)
    assert out.norm() == pytest.approx(shell.norm(), rel=5e-4)
    var_in = shell.second_moment() / shell.norm()
    var_out = out.second_moment() / out.norm()
    assert var_out <= var_in + 1e-10


def test_rearrangement_idempotent():
    grid = RadialGrid.for_domain(6.0, n_points=200)
    shell = RadialProfile.from_callable(
        lambda r: np.exp(-((np.asarray(r) - 1.5) ** 2) / 0.3), grid)
    once = decreasing_rearrangement(shell)
    twice = decreasing_rearrangement(once)
    assert np.abs(twice.values - once.values).max() < 1e-4 * once.values.max()


def test_rearrangement_random_profiles_properties():
    rng = np.random.default_rng(7)
    for _ in range(5):
        p = random_feasible_profile(rng)
        out = decreasing_rearrangement(p)
        assert out.norm() == pytest.approx(p.norm(), rel=5e-4)
        assert out.second_moment() / out.norm() <= p.second_moment() / p.norm() + 1e-8


def test_random_feasible_profiles_are_feasible():
    rng = np.random.default_rng(123)
    for _ in range(10):
        p = random_feasible_profile(rng)
        norm, variance = check_constraints(p)
        assert norm == pytest.approx(1.0, abs=1e-10)
        assert variance == pytest.approx(3.0, rel=1e-6)
        assert np.all(p.values >= 0)


def test_profile_file_roundtrip(tmp_path):
    p = make_closed_form("dp-optimal", n_points=101)
    path = tmp_path / "profile.txt"
    save_profile(p, path)
    text = path.read_text()
    assert text.startswith("# minheat-profile v1\n")
    assert "# support_radius" in text
    back = load_profile(path)
    assert np.array_equal(back.grid, p.grid)
    assert np.array_equal(back.values, p.values)
    assert back.support_radius == pytest.approx(p.support_radius)


def test_profile_file_rejects_other_headers(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("# some other format\n0 1\n1 0\n")
    with pytest.raises(InvalidProfileError):
        load_profile(path)


def test_uniform_sphere_mass_consistency():
    rho = MassDensity.uniform_sphere(10.0, mass=5.0, n_points=100)
    assert rho.norm() == pytest.approx(5.0, rel=1e-12)
    assert rho.total_mass == 5.0
    with pytest.raises(InvalidProfileError):
        MassDensity(rho.grid, rho.values, total_mass=1.0, panel_grid=rho.panel_grid)
