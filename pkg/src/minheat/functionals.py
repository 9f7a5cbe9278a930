"""Heating functionals and radial Fourier transforms.

The three geometric heating functionals, for a normalized smearing g:

    GRW : I[sqrt(g)]   with I[f] = (1/2) int |grad f|^2 = 2 pi int r^2 f'(r)^2 dr
    CSL : I[g]
    DP  : I_DP[g] = (1/4) intint |x-y|^-1 grad g(x).grad g(y) = pi int g^2

The unitary transform convention used for profiles throughout is

    g~(k) = (2 pi)^(-3/2) int g(x) exp(-i k.x) d^3x
          = (2 pi)^(-3/2) * (4 pi / k) * int r g(r) sin(k r) dr.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfiniteRateError, InvalidProfileError, UnsupportedKindError
from .grids import RadialGrid
from .params import ModelParams
from .profiles import RadialProfile, sqrt_profile

GRW = "grw"
CSL = "csl"
DP = "dp"

FUNCTIONAL_KINDS = (GRW, CSL, DP)

#: default wavenumber grid: k = 0 plus 512 log-spaced points in [1e-3, 50]
DEFAULT_K_GRID = np.concatenate(([0.0], np.logspace(-3.0, math.log10(50.0), 512)))
DEFAULT_K_GRID.setflags(write=False)


def validate_kind(kind: str) -> str:
    kind = str(kind).lower()
    if kind not in FUNCTIONAL_KINDS:
        raise UnsupportedKindError(f"unknown functional kind {kind!r}; expected one of {FUNCTIONAL_KINDS}")
    return kind


@dataclass(frozen=True)
class FourierProfile:
    """Radial transform samples g~(k) of a real radial profile (real values)."""

    k: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if k.shape != v.shape or k.ndim != 1:
            raise ValueError("k and values must be 1-D arrays of equal length")
        if np.any(np.diff(k) <= 0) or k[0] < 0:
            raise ValueError("k grid must be non-negative and strictly increasing")
        k.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class HeatingValue:
    """Geometric heating factor with its refinement diagnostics."""

    kind: str
    geometric_value: float
    divergent: bool
    grid_points: int
    est_error: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "geometric_value": None if self.divergent else self.geometric_value,
            "divergent": self.divergent,
            "grid_points": self.grid_points,
            "est_error": self.est_error,
        }


# -- oscillatory panel moments ---------------------------------------------------
#
# C_m(kappa) = int_{-1}^{1} xi^m cos(kappa xi) dxi   (zero for odd m)
# S_m(kappa) = int_{-1}^{1} xi^m sin(kappa xi) dxi   (zero for even m)
#
# Small kappa uses the alternating series, large kappa the stable upward
# recursion; both are exact building blocks for integrating a panel-wise
# polynomial against sin(k r), which keeps the radial transform accurate
# at arbitrarily large wavenumbers.

_SERIES_SWITCH = 8.0
_SERIES_TERMS = 40


def _moments_series(kappa: np.ndarray, m_max: int) -> tuple[np.ndarray, np.ndarray]:
    c = np.zeros((m_max + 1, kappa.size))
    s = np.zeros((m_max + 1, kappa.size))
    k2 = kappa * kappa
    for m in range(0, m_max + 1, 2):
        term = np.full(kappa.shape, 2.0 / (m + 1))
        acc = term.copy()
        for j in range(1, _SERIES_TERMS):
            term = term * (-k2) / ((2 * j) * (2 * j - 1)) * (m + 2 * j - 1) / (m + 2 * j + 1)
            acc += term
        c[m] = acc
    for m in range(1, m_max + 1, 2):
        term = 2.0 * kappa / (m + 2)
        acc = term.copy()
        for j in range(1, _SERIES_TERMS):
            term = term * (-k2) / ((2 * j + 1) * (2 * j)) * (m + 2 * j) / (m + 2 * j + 2)
            acc += term
        s[m] = acc
    return c, s


def _moments_recursion(kappa: np.ndarray, m_max: int) -> tuple[np.ndarray, np.ndarray]:
    c = np.zeros((m_max + 1, kappa.size))
    s = np.zeros((m_max + 1, kappa.size))
    sin_k, cos_k = np.sin(kappa), np.cos(kappa)
    c[0] = 2.0 * sin_k / kappa
    for m in range(1, m_max + 1):
        if m % 2 == 1:
            s[m] = -2.0 * cos_k / kappa + (m / kappa) * c[m - 1]
        else:
            c[m] = 2.0 * sin_k / kappa - (m / kappa) * s[m - 1]
    return c, s


def _panel_moments(kappa: np.ndarray, m_max: int) -> tuple[np.ndarray, np.ndarray]:
    kappa = np.asarray(kappa, dtype=float)
    c = np.zeros((m_max + 1, kappa.size))
    s = np.zeros((m_max + 1, kappa.size))
    small = kappa <= _SERIES_SWITCH
    if small.any():
        cs, ss = _moments_series(kappa[small], m_max)
        c[:, small] = cs
        s[:, small] = ss
    if (~small).any():
        cr, sr = _moments_recursion(kappa[~small], m_max)
        c[:, ~small] = cr
        s[:, ~small] = sr
    return c, s


def _transform_grid(profile: RadialProfile) -> tuple[RadialGrid, np.ndarray]:
    """Panel representation of a profile at transform quality."""
    if profile.evaluator is not None:
        breaks = []
        if profile.support_radius is not None and profile.support_radius < profile.r_max:
            breaks = [profile.support_radius]
        n = max(320, profile.grid.size)
        grid = RadialGrid.for_domain(profile.r_max, n_points=n, breakpoints=breaks,
                                     nodes_per_panel=10)
        vals = np.maximum(np.asarray(profile.evaluator(grid.r), dtype=float), 0.0)
        if profile.support_radius is not None:
            vals = np.where(grid.r > profile.support_radius, 0.0, vals)
        return grid, vals
    if profile.panel_grid is not None:
        return profile.panel_grid, profile.values
    grid = RadialGrid.for_domain(profile.r_max, n_points=max(320, 2 * profile.grid.size),
                                 nodes_per_panel=8)
    return grid, np.asarray(profile.evaluate(grid.r), dtype=float)


def radial_sine_integral(profile: RadialProfile, k: np.ndarray) -> np.ndarray:
    """int_0^rmax r g(r) sin(k r) dr, exact per polynomial panel, any k."""
    k = np.asarray(k, dtype=float)
    grid, vals = _transform_grid(profile)
    out = np.zeros(k.shape)
    nonzero = k != 0.0
    kk = k[nonzero]
    if kk.size:
        acc = np.zeros(kk.size)
        for mid, half, coeffs in grid.panel_monomial_coefficients(vals):
            # q(xi) = (mid + half*xi) * f(xi): polynomial in xi of degree p
            q = np.zeros(coeffs.size + 1)
            q[:-1] += mid * coeffs
            q[1:] += half * coeffs
            m_max = q.size - 1
            c_mom, s_mom = _panel_moments(kk * half, m_max)
            even = q[0::2] @ c_mom[0::2]
            odd = q[1::2] @ s_mom[1::2]
            acc += half * (np.sin(kk * mid) * even + np.cos(kk * mid) * odd)
        out[nonzero] = acc
    return out


def radial_fourier_values(profile: RadialProfile, k) -> np.ndarray:
    """Unitary radial transform g~(k); exact limit at k = 0."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    pref = (2.0 * np.pi) ** -1.5
    out = np.empty(k.shape)
    zero = k == 0.0
    if zero.any():
        out[zero] = pref * profile.norm()
    if (~zero).any():
        sine = radial_sine_integral(profile, k[~zero])
        out[~zero] = pref * 4.0 * np.pi * sine / k[~zero]
    return out


# -- operations -------------------------------------------------------------------


def dirichlet_energy(f: RadialProfile, grid: RadialGrid | None = None) -> float:
    """2 pi int r^2 f'(r)^2 dr (the radial reduction of (1/2) int |grad f|^2)."""
    if grid is None:
        if f.panel_grid is not None:
            return f.panel_grid.dirichlet_energy(f.values)
        grid = RadialGrid.for_domain(f.r_max, n_points=4 * f.grid.size)
    return grid.dirichlet_energy(f.evaluate(grid.r))


def dp_energy(g: RadialProfile, grid: RadialGrid | None = None) -> float:
    """pi int g^2 d^3x = 4 pi^2 int r^2 g(r)^2 dr (derivative-free form)."""
    if grid is None:
        if g.panel_grid is not None:
            return np.pi * g.panel_grid.radial_integral(g.values**2)
        grid = RadialGrid.for_domain(g.r_max, n_points=4 * g.grid.size)
    return np.pi * grid.radial_integral(g.evaluate(grid.r) ** 2)


def dp_energy_coulomb(g: RadialProfile, n_panels: int = 64) -> float:
    """Direct double-integral form (1/4) intint |x-y|^-1 grad g . grad g.

    The angular integrals leave only the l = 1 multipole of the Coulomb
    kernel, giving

        (4 pi^2 / 3) intint r^2 s^2 g'(r) g'(s) min(r,s)/max(r,s)^2 dr ds.

    This is the gradient-route cross-check of dp_energy; it never touches
    the pointwise g^2 form.
    """
    breaks = [b for b in ([g.support_radius] if g.support_radius else []) if b < g.r_max]
    master = RadialGrid.for_domain(g.r_max, n_points=n_panels * 7, breakpoints=breaks,
                                   nodes_per_panel=8)
    vals = g.evaluate(master.r)
    deriv = np.empty_like(vals)
    for kpanel in range(master.n_panels):
        deriv[master.panel_slice(kpanel)] = master.panel_derivative(vals, kpanel)

    def dprime(r):
        return master.interpolate(deriv, r)

    inner_breaks = master.panel_edges
    total = 0.0
    for i, (r_i, w_i) in enumerate(zip(master.r, master.w)):
        if r_i == 0.0:
            continue
        below = 0.0
        if r_i > 0:
            edges = [e for e in inner_breaks if 0.0 < e < r_i]
            gin = RadialGrid.from_panels([0.0, *edges, r_i], nodes_per_panel=8)
            below = float(gin.w @ (gin.r**3 * dprime(gin.r))) / r_i**2
        above = 0.0
        if r_i < master.r_max:
            edges = [e for e in inner_breaks if r_i < e < master.r_max]
            gout = RadialGrid.from_panels([r_i, *edges, master.r_max], nodes_per_panel=8)
            above = r_i * float(gout.w @ dprime(gout.r))
        total += w_i * master.r[i] ** 2 * deriv[i] * (below + above)
    return 4.0 * np.pi**2 / 3.0 * total


def fourier_radial(f: RadialProfile, k=None) -> FourierProfile:
    """Radial Fourier transform on the given (default log-spaced) k grid."""
    k = DEFAULT_K_GRID if k is None else np.asarray(k, dtype=float)
    return FourierProfile(k=np.array(k, dtype=float), values=radial_fourier_values(f, k))


_HEATING_BASE_POINTS = 64
_DIVERGENCE_CONTRACTION = 0.5
_DIVERGENCE_FLOOR = 0.02


def _single_level_value(kind: str, g: RadialProfile, n_points: int) -> float:
    breaks = []
    if g.support_radius is not None and g.support_radius < g.r_max:
        breaks = [g.support_radius]
    grid = RadialGrid.for_domain(g.r_max, n_points=n_points, breakpoints=breaks,
                                 nodes_per_panel=8)
    if kind == GRW:
        vals = np.sqrt(np.maximum(g.evaluate(grid.r), 0.0))
        return grid.dirichlet_energy(vals)
    if kind == CSL:
        return grid.dirichlet_energy(g.evaluate(grid.r))
    return np.pi * grid.radial_integral(g.evaluate(grid.r) ** 2)


def evaluate_heating(kind: str, g: RadialProfile, base_points: int = _HEATING_BASE_POINTS) -> HeatingValue:
    """Geometric heating factor of a profile, with a refinement-divergence flag.

    The functional is evaluated at three grid sizes N, 2N, 4N.  A convergent
    quadrature contracts its refinement increments geometrically; a
    logarithmically divergent one (e.g. the amplitude-level energy of a
    profile whose square root has an edge kink) keeps adding a constant
    increment per doubling.  The value is therefore flagged divergent when
    the increments fail to contract (second increment at least half the
    first) while still being a significant fraction of the value itself.
    """
    kind = validate_kind(kind)
    if np.any(g.values < 0):
        raise InvalidProfileError("heating functionals need a non-negative profile")
    sizes = [base_points, 2 * base_points, 4 * base_points]
    vals = [_single_level_value(kind, g, n) for n in sizes]
    d1, d2 = vals[1] - vals[0], vals[2] - vals[1]
    scale = max(abs(vals[-1]), 1e-300)
    divergent = bool(d1 > 0 and d2 > _DIVERGENCE_CONTRACTION * d1 and d2 > _DIVERGENCE_FLOOR * scale)
    est_error = abs(d2) / scale
    return HeatingValue(kind=kind, geometric_value=vals[-1], divergent=divergent,
                        grid_points=sizes[-1], est_error=est_error)


def physical_heating_rate(kind: str, geometric: HeatingValue, params: ModelParams) -> float:
    """Attach the model prefactor to a finite geometric heating factor.

    GRW : hbar^2 * sum_j(lambda_j / m_j) * I[sqrt(g)]
    CSL : M * m0^-2 * gamma * hbar^2 * I[g]
    DP  : M * hbar * G * I_DP[g]
    """
    kind = validate_kind(kind)
    if geometric.divergent:
        raise InfiniteRateError(f"geometric factor for {kind} is divergent; physical rate is infinite")
    value = geometric.geometric_value
    if kind == GRW:
        return params.hbar**2 * params.grw_rate_over_mass * value
    if kind == CSL:
        return params.total_mass / params.m0**2 * params.gamma_csl * params.hbar**2 * value
    return params.total_mass * params.hbar * params.g_newton * value
