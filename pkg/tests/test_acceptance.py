"""Acceptance suite: every headline number and invariant at its stated
tolerance, one pass/fail line per criterion on the terminal."""

import math
import sys

import numpy as np
import pytest

from minheat import (CSL, ClosedFormProfile, Correlator, DP, GRW, closed_form_F,
                     csl_curve, decreasing_rearrangement, dirichlet_energy,
                     dp_energy, dp_energy_coulomb, evaluate_heating,
                     fourier_radial, gamma_g_from_gamma_c, gaussian_penalty,
                     grw_curve, heating_split, make_closed_form, overlap_k,
                     pair_overlap, pld_correlators, radial_overlap,
                     random_feasible_profile, rescale, rigid_body_rate,
                     safe_k_max, sqrt_profile)
from minheat import check_constraints
from minheat.grids import RadialGrid
from minheat.optimizer import functional_value

from conftest import (EXPECTED_GRADIENT, EXPECTED_OPTIMUM, EXPECTED_SQUARE,
                      K_CSL_OPT, K_GAUSSIAN)

SQRT7 = math.sqrt(7.0)


def _report(number: int, description: str, passed: bool):
    line = f"[acceptance {number:2d}] {'PASS' if passed else 'FAIL'}  {description}\n"
    sys.__stdout__.write(line)
    sys.__stdout__.flush()
    assert passed, f"criterion {number} failed: {description}"


def test_criterion_01_amplitude_heating_of_gaussian(gauss):
    value = evaluate_heating(GRW, gauss).geometric_value
    _report(1, f"amplitude-level heating of the Gaussian = {value:.8f} vs 0.375",
            abs(value / 0.375 - 1.0) < 1e-5)


def test_criterion_02_amplitude_column(gauss, cslopt, dpopt):
    v_gauss = evaluate_heating(GRW, gauss)
    v_csl = evaluate_heating(GRW, cslopt)
    v_dp = evaluate_heating(GRW, dpopt)
    ok = (abs(v_gauss.geometric_value / 0.375 - 1) < 1e-4
          and abs(v_csl.geometric_value / (7 / 12) - 1) < 1e-4
          and not v_gauss.divergent and not v_csl.divergent and v_dp.divergent)
    _report(2, "amplitude-level column {0.375, 7/12, divergent}", ok)


def test_criterion_03_gradient_column(gauss, cslopt, dpopt):
    devs = [abs(dirichlet_energy(p) / EXPECTED_GRADIENT[name] - 1.0)
            for name, p in (("gaussian", gauss), ("csl-optimal", cslopt),
                            ("dp-optimal", dpopt))]
    _report(3, f"gradient-form column, worst dev {max(devs):.2e} (tol 1e-4)",
            max(devs) < 1e-4)


def test_criterion_04_square_column_and_coulomb_cross_check(gauss, cslopt, dpopt):
    pairs = (("gaussian", gauss), ("csl-optimal", cslopt), ("dp-optimal", dpopt))
    devs = [abs(dp_energy(p) / EXPECTED_SQUARE[name] - 1.0) for name, p in pairs]
    cross = [abs(dp_energy_coulomb(p, n_panels=64) / dp_energy(p) - 1.0)
             for _, p in pairs]
    ok = max(devs) < 1e-4 and max(cross) < 1e-3
    _report(4, f"square-form column dev {max(devs):.2e}, double-integral "
               f"cross-check {max(cross):.2e}", ok)


def test_criterion_05_gaussian_penalties():
    pens = {kind: gaussian_penalty(kind) for kind in (GRW, CSL, DP)}
    ok = (abs(pens[GRW]) < 1e-9 and abs(pens[CSL] - 47.0) < 1.0
          and abs(pens[DP] - 22.0) < 1.0)
    _report(5, f"Gaussian penalties {pens[GRW]:.2f}/{pens[CSL]:.2f}/{pens[DP]:.2f} "
               "vs 0/47/22 (+-1)", ok)


def test_criterion_06_optimizer_recovers_closed_forms(opt_results):
    ok = True
    detail = []
    fine = RadialGrid.for_domain(8.0, n_points=2500)
    floor = 1e-5
    for kind in (GRW, CSL, DP):
        res = opt_results[kind, 400]
        ok &= res.converged
        ok &= abs(res.value / EXPECTED_OPTIMUM[kind] - 1.0) < 5e-3
        from minheat.optimizer import optimal_profile

        ref_vals = optimal_profile(kind, n_points=321).evaluate(fine.r)
        dists = []
        for n in (100, 200, 400):
            diff = opt_results[kind, n].profile.evaluate(fine.r) - ref_vals
            dists.append(max(math.sqrt(fine.radial_integral(diff**2)), floor))
        ok &= dists[0] >= dists[1] >= dists[2]
        detail.append(f"{kind}:{abs(res.value / EXPECTED_OPTIMUM[kind] - 1):.1e}")
    lam, mu = opt_results[CSL, 400].multipliers
    mult_ok = abs(lam / (-0.6 * mu * 9.0) - 1.0) < 1e-2
    ok &= mult_ok
    _report(6, "optimizer vs closed forms (" + ", ".join(detail)
            + f"), multiplier relation dev {abs(lam / (-0.6 * mu * 9.0) - 1):.1e}", ok)


def test_criterion_07_overlap_polynomials(cslopt):
    amp = sqrt_profile(cslopt)
    k_val = overlap_k(cslopt).value
    svals = np.linspace(0.05, 1.95, 20)
    worst = 0.0
    for s in svals:
        worst = max(worst,
                    abs(radial_overlap(amp, amp, 3.0 * s) - closed_form_F("grw", s)),
                    abs(pair_overlap(cslopt, 3.0 * s) / k_val - closed_form_F("csl", s)))
    edges = max(abs(closed_form_F("grw", 0.0) - 1.0),
                abs(closed_form_F("csl", 0.0) - 1.0),
                abs(closed_form_F("grw", 2.0 - 1e-14)),
                abs(closed_form_F("csl", 2.0 - 1e-14)))
    ok = worst < 1e-6 and edges < 1e-9
    _report(7, f"overlap polynomials vs quadrature, worst {worst:.1e} (tol 1e-6), "
               f"edges {edges:.1e} (tol 1e-9)", ok)


def test_criterion_08_gaussian_model_equivalence():
    narrow = make_closed_form(ClosedFormProfile("gaussian", r_c=1 / math.sqrt(2)),
                              n_points=241, r_max=8.0)
    wide = make_closed_form("gaussian", n_points=241)
    ds = np.linspace(0.0, 10.0, 41)
    dev = np.abs(grw_curve(narrow, ds).rates - csl_curve(wide, ds).rates).max()
    _report(8, f"discrete/continuous single-particle equivalence, dev {dev:.1e} "
               "(tol 1e-8)", dev < 1e-8)


def test_criterion_09_overlap_constants(gauss, cslopt):
    dev1 = abs(overlap_k(gauss).value / K_GAUSSIAN - 1.0)
    dev2 = abs(overlap_k(cslopt).value / K_CSL_OPT - 1.0)
    _report(9, f"self-overlap constants, devs {dev1:.1e}/{dev2:.1e} (tol 1e-6)",
            max(dev1, dev2) < 1e-6)


def test_criterion_10_least_decoherence_recovery(gauss):
    k = np.geomspace(1e-3, safe_k_max(gauss), 256)
    ft = fourier_radial(gauss, k)
    gamma_c, gamma_g = pld_correlators(ft, ft)
    coulomb = 2 * np.pi / gamma_c.k**2
    dev_c = np.abs(gamma_c.values / coulomb - 1.0).max()
    dev_g = np.abs(gamma_g.values / coulomb - 1.0).max()
    e_c, e_g = heating_split(gamma_c, gauss, gauss)
    split_dev = abs(e_c / e_g - 1.0)
    ok = max(dev_c, dev_g) < 1e-10 and split_dev < 1e-8
    _report(10, f"matched-smearing correlators dev {max(dev_c, dev_g):.1e} "
                f"(tol 1e-10), heating split dev {split_dev:.1e} (tol 1e-8)", ok)


def test_criterion_11_involution_and_product_identities(gauss):
    k = np.geomspace(1e-3, 40.0, 300)
    sampled = Correlator.sampled(k, 0.7 + k**0.8 / (1 + k**2))
    worst = 0.0
    for gamma in (Correlator.csl_delta(gamma_csl=2.0, m0=1.3),
                  Correlator.dp_coulomb(g_newton=1.1, hbar=0.9), sampled):
        dual = gamma_g_from_gamma_c(gamma)
        back = gamma_g_from_gamma_c(dual)
        worst = max(worst, np.abs(back.evaluate(k) / gamma.evaluate(k) - 1.0).max())
        pref = 4 * np.pi**2 * gamma.params.g_newton**2 / gamma.params.hbar**2
        product = gamma.evaluate(k) * dual.evaluate(k) * k**4 / pref
        worst = max(worst, np.abs(product - 1.0).max())
    _report(11, f"involution and product identities, worst {worst:.1e} (tol 1e-12)",
            worst < 1e-12)


def test_criterion_12_rigid_body_smearing_independence(sphere, smeared_spheres):
    gamma = Correlator.csl_delta()
    worst = 0.0
    for d in (20.0, 100.0, 250.0):
        r_gauss = rigid_body_rate(smeared_spheres["gaussian"], gamma, d)
        r_bump = rigid_body_rate(smeared_spheres["csl-optimal"], gamma, d)
        worst = max(worst, abs(r_gauss / r_bump - 1.0))
    analytic = 3.0 / (4 * np.pi * 100.0**3)
    asym_dev = abs(rigid_body_rate(sphere, gamma, 250.0) / analytic - 1.0)
    ok = worst < 1e-2 and asym_dev < 1e-3
    _report(12, f"rigid-body smearing independence {worst:.1e} (tol 1e-2), "
                f"asymptote dev {asym_dev:.1e} (tol 1e-3)", ok)


def test_criterion_13_property_suites(gauss, cslopt, opt_results):
    rng = np.random.default_rng(1234)
    # scaling exponents of the three functionals under dilation
    alpha = 1.6
    scaling_ok = (
        abs(dirichlet_energy(rescale(gauss, alpha)) /
            (alpha**5 * dirichlet_energy(gauss)) - 1) < 1e-9
        and abs(dirichlet_energy(sqrt_profile(rescale(gauss, alpha))) /
                (alpha**2 * dirichlet_energy(sqrt_profile(gauss))) - 1) < 1e-9
        and abs(dp_energy(rescale(cslopt, alpha)) /
                (alpha**3 * dp_energy(cslopt)) - 1) < 1e-9)

    # convexity chord inequality on random feasible pairs
    convex_ok = True
    from minheat import RadialProfile

    for _ in range(5):
        f = random_feasible_profile(rng)
        h_vals = random_feasible_profile(rng).evaluate(f.grid)
        for lam in (0.3, 0.7):
            combo = RadialProfile(f.grid, lam * f.values + (1 - lam) * h_vals,
                                  panel_grid=f.panel_grid)
            bound = (lam * dirichlet_energy(f)
                     + (1 - lam) * dirichlet_energy(
                         RadialProfile(f.grid, h_vals, panel_grid=f.panel_grid)))
            convex_ok &= dirichlet_energy(combo) <= bound + 1e-10

    # rearrangement preserves the norm and never increases the variance
    rearrange_ok = True
    for _ in range(5):
        p = random_feasible_profile(rng)
        out = decreasing_rearrangement(p)
        rearrange_ok &= abs(out.norm() / p.norm() - 1.0) < 5e-4
        # non-increase up to the shell-interpolation quadrature tolerance
        rearrange_ok &= (out.second_moment() / out.norm()
                         <= p.second_moment() / p.norm() + 3e-6)

    # global-minimum certificate over 100 random feasible competitors
    randoms = [random_feasible_profile(rng) for _ in range(100)]
    certificate_ok = True
    for kind in (GRW, CSL, DP):
        best = opt_results[kind, 400].value
        values = [functional_value(kind, p) for p in randoms]
        certificate_ok &= min(values) >= best - 1e-9

    ok = scaling_ok and convex_ok and rearrange_ok and certificate_ok
    _report(13, f"property suites: scaling {scaling_ok}, convexity {convex_ok}, "
                f"rearrangement {rearrange_ok}, certificate {certificate_ok}", ok)
