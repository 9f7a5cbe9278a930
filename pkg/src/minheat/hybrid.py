"""Fourier-space correlator algebra for measurement-plus-feedback models.

Spatial noise correlators are translation invariant and live in k-space as
plain transforms gamma~(k) = int gamma(u) exp(-i k.u) d^3u (never
materialized in real space).  The measurement correlator gamma_C and the
gravitational feedback correlator gamma_G are tied together by

    gamma~_G(k) = 4 pi^2 G^2 / (hbar^2 k^4 gamma~_C(k)),

an involution: applying the map twice returns the original correlator.
The white-noise kernel gamma~_C = gamma / m0^2 reproduces the continuous
collapse model; the Coulomb kernel gamma~_C = 2 pi G / (hbar k^2) is the
self-dual fixed point of the map.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import functionals as fn
from . import optimizer as opt
from .errors import DivergenceError, InversionError, PldUndefinedError
from .grids import RadialGrid
from .params import ModelParams
from .profiles import RadialProfile

CSL_DELTA = "csl-delta"
DP_COULOMB = "dp-coulomb"
PLD = "pld"
SAMPLED = "sampled"
DUAL = "dual"


@dataclass(frozen=True)
class Correlator:
    """Radial noise correlator gamma~(k), closed-form or sampled.

    kind : one of {csl-delta, dp-coulomb, pld, sampled, dual}
    params : physical constants the closed forms need
    k / values : sample grid, for the sampled representation
    base : wrapped correlator, for the dual representation
    """

    kind: str
    params: ModelParams = field(default_factory=ModelParams)
    k: np.ndarray | None = None
    values: np.ndarray | None = None
    base: "Correlator | None" = None

    def __post_init__(self):
        if self.kind == SAMPLED:
            k = np.asarray(self.k, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if k.ndim != 1 or k.shape != v.shape:
                raise ValueError("sampled correlator needs matching 1-D k and values")
            if np.any(k <= 0) or np.any(np.diff(k) <= 0):
                raise ValueError("sampled correlator k grid must be positive and increasing")
            if np.any(v <= 0):
                bad = k[v <= 0][:5]
                raise InversionError(f"correlator must be strictly positive; "
                                     f"non-positive samples at k = {bad.tolist()}")
            k.setflags(write=False)
            v.setflags(write=False)
            object.__setattr__(self, "k", k)
            object.__setattr__(self, "values", v)
        elif self.kind == DUAL:
            if self.base is None:
                raise ValueError("dual correlator needs a base")
        elif self.kind not in (CSL_DELTA, DP_COULOMB):
            raise ValueError(f"unknown correlator kind {self.kind!r}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def csl_delta(cls, gamma_csl: float = 1.0, m0: float = 1.0, **extra) -> "Correlator":
        return cls(CSL_DELTA, params=ModelParams(gamma_csl=gamma_csl, m0=m0, **extra))

    @classmethod
    def dp_coulomb(cls, g_newton: float = 1.0, hbar: float = 1.0, **extra) -> "Correlator":
        return cls(DP_COULOMB, params=ModelParams(g_newton=g_newton, hbar=hbar, **extra))

    @classmethod
    def sampled(cls, k, values, params: ModelParams | None = None) -> "Correlator":
        return cls(SAMPLED, params=params or ModelParams(), k=k, values=values)

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        if self.kind == CSL_DELTA:
            return np.full(k.shape, self.params.gamma_csl / self.params.m0**2)
        if self.kind == DP_COULOMB:
            return 2.0 * np.pi * self.params.g_newton / (self.params.hbar * k**2)
        if self.kind == DUAL:
            base_vals = self.base.evaluate(k)
            if np.any(base_vals <= 0):
                raise InversionError("cannot invert a correlator with non-positive values")
            pref = 4.0 * np.pi**2 * self.params.g_newton**2 / self.params.hbar**2
            return pref / (k**4 * base_vals)
        # sampled: interpolate log-log linearly, clamp to the sampled range
        kq = np.clip(k, self.k[0], self.k[-1])
        with np.errstate(divide="ignore"):
            return np.exp(np.interp(np.log(kq), np.log(self.k), np.log(self.values)))

    @property
    def k_range(self) -> tuple[float, float] | None:
        if self.kind == SAMPLED:
            return float(self.k[0]), float(self.k[-1])
        if self.kind == DUAL:
            return self.base.k_range
        return None

    def to_dict(self) -> dict:
        meta = {"representation": self.kind,
                "params": {"G": self.params.g_newton, "hbar": self.params.hbar,
                           "m0": self.params.m0, "gamma_csl": self.params.gamma_csl}}
        if self.kind == DUAL:
            meta["base"] = self.base.to_dict()
        return meta


def save_correlator(corr: Correlator, path, k_grid=None) -> None:
    """Write `k,gamma_tilde` CSV samples plus a JSON sidecar with metadata.

    Closed-form correlators are sampled on the given grid (default: the
    positive part of the standard wavenumber grid).
    """
    if corr.kind == SAMPLED:
        k, vals = corr.k, corr.values
    else:
        k = np.asarray(k_grid if k_grid is not None else
                       fn.DEFAULT_K_GRID[fn.DEFAULT_K_GRID > 0], dtype=float)
        vals = corr.evaluate(k)
    lines = ["k,gamma_tilde"]
    lines += [f"{ki:.17g},{vi:.17g}" for ki, vi in zip(k, vals)]
    path = str(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    with open(path + ".json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(corr.to_dict(), fh, indent=2)
        fh.write("\n")


def load_correlator(path) -> Correlator:
    """Read the CSV-plus-sidecar correlator format back as a sampled correlator."""
    path = str(path)
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "k,gamma_tilde":
            raise ValueError(f"not a correlator file: {path}")
        for line in fh:
            line = line.strip()
            if line:
                a, b = line.split(",")
                rows.append((float(a), float(b)))
    arr = np.asarray(rows)
    params = ModelParams()
    try:
        with open(path + ".json", "r", encoding="utf-8") as fh:
            meta = json.load(fh).get("params", {})
        params = ModelParams(g_newton=meta.get("G", 1.0), hbar=meta.get("hbar", 1.0),
                             m0=meta.get("m0", 1.0), gamma_csl=meta.get("gamma_csl", 1.0))
    except FileNotFoundError:
        pass
    return Correlator.sampled(arr[:, 0], arr[:, 1], params=params)


def gamma_g_from_gamma_c(gamma_c: Correlator) -> Correlator:
    """Feedback correlator induced by a measurement correlator.

    The map is its own inverse; the Coulomb kernel maps to itself, and the
    double application returns the exact starting correlator.
    """
    if gamma_c.kind == DP_COULOMB:
        return gamma_c  # self-dual fixed point
    if gamma_c.kind == DUAL:
        return gamma_c.base
    if gamma_c.kind == SAMPLED:
        pref = 4.0 * np.pi**2 * gamma_c.params.g_newton**2 / gamma_c.params.hbar**2
        vals = pref / (gamma_c.k**4 * gamma_c.values)
        return Correlator.sampled(gamma_c.k, vals, params=gamma_c.params)
    return Correlator(DUAL, params=gamma_c.params, base=gamma_c)


def pld_correlators(g_c_tilde: fn.FourierProfile, g_g_tilde: fn.FourierProfile,
                    params: ModelParams | None = None,
                    zero_rtol: float = 1e-9) -> tuple[Correlator, Correlator]:
    """Least-decoherence correlator pair from the two smearing transforms.

    Minimizing the single-particle decoherence integrand mode by mode gives

        gamma~_C = (2 pi G / hbar k^2) |g~_G| / |g~_C|,
        gamma~_G = (2 pi G / hbar k^2) |g~_C| / |g~_G|,

    whose product is pinned to 4 pi^2 G^2 / (hbar^2 k^4) at every k.  The
    construction is undefined wherever a transform vanishes (compact-support
    profiles); those wavenumbers are reported in the raised error.
    """
    params = params or ModelParams()
    if g_c_tilde.k.shape != g_g_tilde.k.shape or np.any(g_c_tilde.k != g_g_tilde.k):
        raise ValueError("the two transforms must share one k grid")
    keep = g_c_tilde.k > 0.0
    k = g_c_tilde.k[keep]
    vc = g_c_tilde.values[keep]
    vg = g_g_tilde.values[keep]

    zeros = sorted(set(_transform_zeros(k, vc, zero_rtol))
                   | set(_transform_zeros(k, vg, zero_rtol)))
    if zeros:
        raise PldUndefinedError(
            "least-decoherence correlators undefined: smearing transform vanishes "
            f"near k = {[round(z, 6) for z in zeros[:8]]}", zeros=zeros)

    coulomb = 2.0 * np.pi * params.g_newton / (params.hbar * k**2)
    ratio = np.abs(vg) / np.abs(vc)
    gamma_c = Correlator.sampled(k, coulomb * ratio, params=params)
    gamma_g = Correlator.sampled(k, coulomb / ratio, params=params)
    return gamma_c, gamma_g


def _transform_zeros(k: np.ndarray, vals: np.ndarray, zero_rtol: float) -> list[float]:
    # Exact zeros (including float underflow of a decaying tail) and
    # significant sign crossings.  Noise-level sign flips deep in a decayed
    # tail are not zeros of the underlying transform and only the ratio of
    # the two transforms enters, so crossings count only when a neighboring
    # sample is appreciable on the scale of the transform.
    zeros = k[(vals == 0.0) | ~np.isfinite(vals)].tolist()
    scale = np.max(np.abs(vals))
    sign_change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    for i in sign_change:
        if max(abs(vals[i]), abs(vals[i + 1])) <= zero_rtol * scale:
            continue
        # linear crossing estimate between samples
        k0, k1 = k[i], k[i + 1]
        v0, v1 = vals[i], vals[i + 1]
        zeros.append(float(k0 - v0 * (k1 - k0) / (v1 - v0)))
    return zeros


def safe_k_max(profile: RadialProfile, k_cap: float = 50.0, floor_rel: float = 1e-10) -> float:
    """Largest wavenumber below k_cap where the transform is numerically
    trustworthy (above floor_rel times its peak).

    A decaying transform drops under the floating-point noise floor of the
    quadrature; sampling a least-decoherence correlator out there would
    divide noise by noise.
    """
    probe = np.geomspace(1e-3, k_cap, 256)
    vals = np.abs(fn.radial_fourier_values(profile, probe))
    ok = vals > floor_rel * np.max(vals)
    if ok.all():
        return k_cap
    first_bad = int(np.argmin(ok))
    return float(probe[max(first_bad - 1, 1)] * 0.95)


def general_heating(gamma: Correlator, g: RadialProfile, rtol: float = 1e-9) -> float:
    """Correlator-weighted heating functional of a smearing distribution.

    Evaluated in k-space as

        I_gamma[g] = (1/2) int d^3k gamma~(k) k^2 |g~(k)|^2
                   = 2 pi int dk k^4 gamma~(k) g~(k)^2,

    the convention being pinned by two reductions: the white-noise kernel
    gives (gamma / m0^2) times the gradient-form energy of g, the Coulomb
    kernel (G / hbar) times the derivative-free form.
    """
    from .decoherence import _octave_integrate

    r_scale = g.support_radius or g.r_max

    def integrand(k):
        return 2.0 * np.pi * k**4 * gamma.evaluate(k) * radial_fourier_values_cached(g, k) ** 2

    k_range = gamma.k_range
    if k_range is not None:
        # sampled correlator: integrate over its own window only
        lo, hi = k_range
        grid = RadialGrid.from_panels(
            np.unique(np.concatenate([np.geomspace(lo, hi, 200),
                                      np.arange(lo, hi, math.pi / (2 * r_scale))])),
            nodes_per_panel=8)
        return float(grid.integrate(integrand(grid.r)))
    return _octave_integrate(integrand, r_scale, k_start=1e-5, rtol=rtol)


def radial_fourier_values_cached(g: RadialProfile, k) -> np.ndarray:
    return fn.radial_fourier_values(g, k)


def heating_split(gamma_c: Correlator, g_c: RadialProfile, g_g: RadialProfile,
                  params: ModelParams | None = None) -> tuple[float, float]:
    """(measurement, feedback) heating terms; the total is their sum."""
    params = params or gamma_c.params
    gamma_g = gamma_g_from_gamma_c(gamma_c)
    e_c = params.hbar**2 * params.total_mass * general_heating(gamma_c, g_c)
    e_g = params.hbar**2 * params.total_mass * general_heating(gamma_g, g_g)
    return e_c, e_g


def _correlator_objective_matrix(gamma: Correlator, grid: RadialGrid,
                                 k_max: float | None = None) -> np.ndarray:
    """Quadratic form of I_gamma over profile samples on the given grid.

    g~(k) is the quadrature transform sum_i volw_i g_i j0(k r_i), so the
    functional is g @ A @ g with A assembled from a k quadrature.  The
    wavenumber window is capped where the grid can still resolve the
    oscillation of j0(k r).
    """
    dr_mean = grid.r_max / grid.n_points
    k_cap = 1.5 / dr_mean
    k_max = k_cap if k_max is None else min(k_max, k_cap)
    lo, hi = 1e-4, k_max
    if gamma.k_range is not None:
        lo = max(lo, gamma.k_range[0])
        hi = min(hi, gamma.k_range[1])
    k_grid = RadialGrid.from_panels(np.geomspace(lo, hi, 240), nodes_per_panel=8)
    kv = k_grid.r
    gam = gamma.evaluate(kv)
    if np.any(~np.isfinite(gam)) or np.any(gam < 0):
        raise InversionError("correlator must be finite and non-negative on the k window")
    with np.errstate(invalid="ignore"):
        j0 = np.where(np.abs(np.multiply.outer(kv, grid.r)) < 1e-12, 1.0,
                      np.sin(np.multiply.outer(kv, grid.r))
                      / np.where(np.multiply.outer(kv, grid.r) == 0.0, 1.0,
                                 np.multiply.outer(kv, grid.r)))
    t_mat = (2.0 * np.pi) ** -1.5 * j0 * grid.vol_w[None, :]
    d_weights = 2.0 * np.pi * k_grid.w * kv**4 * gam
    a_mat = t_mat.T @ (d_weights[:, None] * t_mat)
    return 0.5 * (a_mat + a_mat.T)


def optimize_hybrid(gamma_c: Correlator, r_c: float = 1.0, r_g: float = 1.0,
                    n_points: int = 400, options: opt.SolverOptions | None = None,
                    ) -> tuple[RadialProfile, RadialProfile]:
    """Optimal measurement and feedback smearings for a given correlator.

    The heating splits into independent terms for the two channels, so the
    two constrained problems (variances 3 r_c^2 and 3 r_g^2) are solved
    separately.  The closed-form kernels route to the specialized convex
    programs; anything else is minimized through the sampled k-space
    quadratic form.
    """
    gamma_g = gamma_g_from_gamma_c(gamma_c)
    prof_c = _optimize_channel(gamma_c, r_c, n_points, options)
    prof_g = _optimize_channel(gamma_g, r_g, n_points, options)
    return prof_c, prof_g


def _power_law_shape(gamma: Correlator) -> float | None:
    """Exponent s when the sampled correlator is exactly C * k^-s."""
    if gamma.kind != SAMPLED:
        return None
    logk = np.log(gamma.k)
    logv = np.log(gamma.values)
    slope, intercept = np.polyfit(logk, logv, 1)
    if np.max(np.abs(logv - (slope * logk + intercept))) > 1e-8:
        return None
    return -float(slope)


def _optimize_channel(gamma: Correlator, r_scale: float, n_points: int,
                      options: opt.SolverOptions | None) -> RadialProfile:
    cons = opt.ConstraintSet(target_norm=1.0, target_second_moment=3.0 * r_scale**2)
    shape = _power_law_shape(gamma)
    if gamma.kind == DP_COULOMB or (shape is not None and abs(shape - 2.0) < 1e-6):
        # Coulomb-type kernel: the minimizer is scale-independent, so route
        # to the exact derivative-free objective
        result = opt.minimize(fn.DP, n_points=n_points, options=options, constraints=cons)
    elif gamma.kind == CSL_DELTA or (shape is not None and abs(shape) < 1e-6):
        result = opt.minimize(fn.CSL, n_points=n_points, options=options, constraints=cons)
    else:
        opts = options or opt.SolverOptions()
        r_max = opts.r_max if opts.r_max is not None else 4.5 * r_scale
        grid = RadialGrid.for_domain(r_max, n_points=n_points,
                                     nodes_per_panel=opts.nodes_per_panel)
        a_mat = _correlator_objective_matrix(gamma, grid)
        result = opt.minimize("correlator", n_points=n_points, options=options,
                              constraints=cons, objective_matrix=a_mat, grid=grid)
    if not result.converged:
        resid = max(abs(result.residuals[0]), abs(result.residuals[1]))
        if resid <= 1e-3:
            # strongly smoothing correlators (e.g. the k^-4 dual of white
            # noise) have Coulomb-type objectives whose true minimizer is a
            # singular shell measure outside the profile space; the discrete
            # problem is then degenerate and only approximately solvable
            warnings.warn(
                f"channel optimization for the {gamma.kind} correlator is "
                f"degenerate (residual {resid:.1e}); returned profile is a "
                "best-effort approximation",
                RuntimeWarning, stacklevel=2)
        else:
            raise DivergenceError(
                f"channel optimization did not converge (residuals {result.residuals})")
    return result.profile
