import math

import numpy as np
import pytest

from minheat import (CSL, DP, GRW, MassDensity, make_closed_form, minimize,
                     smear_density)

# analytic values of the three heating functionals on the three families
SQRT7 = math.sqrt(7.0)
EXPECTED_AMPLITUDE = {  # I[sqrt(g)]
    "gaussian": 0.375,
    "csl-optimal": 7.0 / 12.0,
    "dp-optimal": math.inf,
}
EXPECTED_GRADIENT = {  # I[g]
    "gaussian": 3.0 / (32.0 * math.pi**1.5),
    "csl-optimal": 35.0 / (972.0 * math.pi),
    "dp-optimal": 45.0 / (392.0 * SQRT7 * math.pi),
}
EXPECTED_SQUARE = {  # pi * int g^2
    "gaussian": 1.0 / (8.0 * math.sqrt(math.pi)),
    "csl-optimal": 35.0 / 594.0,
    "dp-optimal": 15.0 / (14.0 * 7.0**1.5),
}
EXPECTED_OPTIMUM = {GRW: 0.375, CSL: 35.0 / (972.0 * math.pi),
                    DP: 15.0 / (14.0 * 7.0**1.5)}
K_GAUSSIAN = (2.0 * math.sqrt(math.pi)) ** -3
K_CSL_OPT = 35.0 / (594.0 * math.pi)


@pytest.fixture(scope="session")
def gauss():
    return make_closed_form("gaussian", n_points=241)


@pytest.fixture(scope="session")
def cslopt():
    return make_closed_form("csl-optimal", n_points=241)


@pytest.fixture(scope="session")
def dpopt():
    return make_closed_form("dp-optimal", n_points=241)


@pytest.fixture(scope="session")
def opt_results():
    """All optimizer runs used by the solver and acceptance tests."""
    out = {}
    for kind in (GRW, CSL, DP):
        for n in (100, 200, 400):
            out[kind, n] = minimize(kind, n_points=n)
    return out


@pytest.fixture(scope="session")
def sphere():
    return MassDensity.uniform_sphere(100.0, mass=1.0, n_points=240)


@pytest.fixture(scope="session")
def smeared_spheres(sphere, gauss, cslopt):
    return {
        "gaussian": smear_density(sphere, gauss, n_points=320),
        "csl-optimal": smear_density(sphere, cslopt, n_points=320),
    }
