"""Spatial decoherence rates for single particles and rigid bodies.

Superposition coherence at separation d decays at a rate controlled by the
overlap of shifted copies of the smearing distribution (single particles)
or of the mass density (rigid bodies).  All autocorrelations here are done
in bipolar coordinates,

    int d^3x f(|x|) h(|x + d|) = (2 pi / d) int dr r f(r) int_{|r-d|}^{r+d} ds s h(s),

with panel splits at every point where an integration limit crosses a panel
edge of the inner function, so compact supports are handled exactly and the
closed-form overlap polynomials can be checked at 1e-6 and below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, UnsupportedKindError
from .functionals import radial_fourier_values
from .grids import RadialGrid
from .params import ModelParams
from .profiles import MassDensity, RadialProfile, sqrt_profile

GRW_MODEL = "grw"
CSL_MODEL = "csl"
HYBRID_MODEL = "hybrid"


@dataclass(frozen=True)
class OverlapK:
    """Self-overlap K = int g^2 d^3x of a smearing distribution."""

    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError("overlap K must be positive for a non-trivial profile")

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class DecoherenceCurve:
    """Decoherence rate versus superposition distance, in units of the
    model rate constant."""

    distances: np.ndarray
    rates: np.ndarray
    model: str
    asymptote: float

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        g = np.asarray(self.rates, dtype=float)
        if d.shape != g.shape or d.ndim != 1:
            raise ValueError("distances and rates must be 1-D arrays of equal length")
        d.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "distances", d)
        object.__setattr__(self, "rates", g)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "asymptote": self.asymptote,
            "d": list(map(float, self.distances)),
            "gamma_over_rate_constant": list(map(float, self.rates)),
        }


def one_minus_j0(x) -> np.ndarray:
    """1 - sin(x)/x, series-stabilized near the origin."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape)
    small = np.abs(x) < 1e-2
    xs = x[small]
    x2 = xs * xs
    out[small] = x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    xl = x[~small]
    out[~small] = 1.0 - np.sin(xl) / xl
    return out


# -- bipolar-coordinate overlap machinery -----------------------------------------


class _PanelFunction:
    """Panel-polynomial view of a radial profile with an exact cumulative
    integral G(t) = int_0^t s f(s) ds."""

    def __init__(self, profile: RadialProfile):
        from .functionals import _transform_grid

        grid, vals = _transform_grid(profile)
        self.grid = grid
        self.vals = vals
        self.r_top = grid.r_max
        cut = profile.support_radius
        self.support = min(cut, grid.r_max) if cut is not None else grid.r_max
        node_integrand = grid.r * vals
        self.edge_cum = np.zeros(grid.n_panels + 1)
        x_ref, w_ref = _gl_nodes(16)
        self._gl_x, self._gl_w = x_ref, w_ref
        for k in range(grid.n_panels):
            a, b = grid.panel_edges[k], grid.panel_edges[k + 1]
            half = 0.5 * (b - a)
            nodes = a + (x_ref + 1.0) * half
            fx = grid.interpolate(vals, nodes)
            self.edge_cum[k + 1] = self.edge_cum[k] + half * float(w_ref @ (nodes * fx))

    def __call__(self, r):
        return self.grid.interpolate(self.vals, r)

    def cumulative(self, t) -> np.ndarray:
        """G(t), exact for the panel interpolant; constant beyond the top edge."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        tc = np.clip(t, 0.0, self.r_top)
        idx = np.clip(np.searchsorted(self.grid.panel_edges, tc, side="right") - 1,
                      0, self.grid.n_panels - 1)
        lo = self.grid.panel_edges[idx]
        half = 0.5 * (tc - lo)
        # 16-point Gauss-Lobatto on each partial panel [edge, t]
        nodes = lo[:, None] + (self._gl_x[None, :] + 1.0) * half[:, None]
        fx = self.grid.interpolate(self.vals, nodes.ravel()).reshape(nodes.shape)
        partial = half * ((nodes * fx) @ self._gl_w)
        return self.edge_cum[idx] + partial


def _gl_nodes(n):
    from .grids import gauss_lobatto

    return gauss_lobatto(n)


def _overlap_outer_grid(f: _PanelFunction, h: _PanelFunction, d: float) -> RadialGrid:
    """Outer r-grid whose panels keep both inner limits |r-d| and r+d inside
    single panels of h, so the overlap integrand stays panel-wise polynomial."""
    crits = set()
    for e in h.grid.panel_edges:
        crits.update((e - d, e + d, d - e))
    crits.add(d)
    top = f.support
    crits = sorted(c for c in crits if 0.0 < c < top)
    base = max(120, f.grid.n_panels * 4)
    return RadialGrid.for_domain(top, n_points=base, breakpoints=crits, nodes_per_panel=12)


def radial_overlap(f: RadialProfile, h: RadialProfile, d: float) -> float:
    """int d^3x f(|x|) h(|x + d|) for radial f, h and shift distance d >= 0."""
    if d < 0:
        raise ValueError("shift distance must be non-negative")
    pf, ph = _PanelFunction(f), _PanelFunction(h)
    if d == 0.0:
        grid = pf.grid if pf.grid.n_points >= ph.grid.n_points else ph.grid
        return grid.radial_integral(pf(grid.r) * ph(grid.r))
    if d >= pf.support + ph.support:
        return 0.0
    outer = _overlap_outer_grid(pf, ph, d)
    r = outer.r
    hi = np.minimum(r + d, ph.support)
    lo = np.minimum(np.abs(r - d), ph.support)
    inner = ph.cumulative(hi) - ph.cumulative(lo)
    return 2.0 * np.pi / d * outer.integrate(r * pf(r) * inner)


def pair_overlap(f: RadialProfile, d: float) -> float:
    """Autocorrelation int g(x) g(x + d) d^3x of a radial profile."""
    return radial_overlap(f, f, d)


def radial_convolution(f: RadialProfile, h: RadialProfile, n_points: int = 400) -> RadialProfile:
    """Radial profile of the 3-D convolution (f * h)(r)."""
    pf, ph = _PanelFunction(f), _PanelFunction(h)
    top = pf.support + ph.support
    breaks = sorted({pf.support, ph.support,
                     abs(pf.support - ph.support)} - {0.0, top})
    out_grid = RadialGrid.for_domain(top, n_points=n_points, breakpoints=breaks,
                                     nodes_per_panel=8)

    def convolved(r):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty(r.shape)
        for i, ri in enumerate(r):
            if ri == 0.0:
                grid = pf.grid
                out[i] = grid.radial_integral(pf(grid.r) * ph(grid.r))
            else:
                out[i] = _convolve_at(pf, ph, ri)
        return out

    vals = convolved(out_grid.r)
    support = top if (f.support_radius is not None and h.support_radius is not None) else None
    return RadialProfile(out_grid.r, np.maximum(vals, 0.0), support_radius=support,
                         panel_grid=out_grid)


def _convolve_at(pf: _PanelFunction, ph: _PanelFunction, r: float) -> float:
    outer = _overlap_outer_grid(pf, ph, r)
    s = outer.r
    hi = np.minimum(s + r, ph.support)
    lo = np.minimum(np.abs(s - r), ph.support)
    inner = ph.cumulative(hi) - ph.cumulative(lo)
    return 2.0 * np.pi / r * outer.integrate(s * pf(s) * inner)


# -- single-particle overlaps -------------------------------------------------------


def overlap_k(g: RadialProfile) -> OverlapK:
    """K = int g^2 d^3x, the zero-shift self-overlap."""
    pg = _PanelFunction(g)
    return OverlapK(pg.grid.radial_integral(pg(pg.grid.r) ** 2))


def grw_curve(g: RadialProfile, ds) -> DecoherenceCurve:
    """Discrete-model rate: Gamma / lambda = 1 - int sqrt(g) sqrt(g(.+d)).

    The amplitude-level autocorrelation equals 1 at zero shift because g is
    normalized, so the curve starts at 0 and saturates at 1.
    """
    ds = np.asarray(ds, dtype=float)
    amp = sqrt_profile(g)
    rates = np.array([1.0 - radial_overlap(amp, amp, d) for d in ds])
    return DecoherenceCurve(distances=ds, rates=rates, model=GRW_MODEL, asymptote=1.0)


def csl_curve(g: RadialProfile, ds) -> DecoherenceCurve:
    """Continuous-model rate: Gamma / (gamma K) = 1 - int g g(.+d) / K."""
    ds = np.asarray(ds, dtype=float)
    k_val = overlap_k(g).value
    rates = np.array([1.0 - radial_overlap(g, g, d) / k_val for d in ds])
    return DecoherenceCurve(distances=ds, rates=rates, model=CSL_MODEL, asymptote=1.0)


_F_GRW_COEFFS = {2: -7.0 / 4.0, 3: 35.0 / 32.0, 5: -7.0 / 64.0, 7: 3.0 / 512.0}
_F_CSL_COEFFS = {2: -11.0 / 6.0, 4: 33.0 / 16.0, 5: -77.0 / 64.0, 7: 33.0 / 256.0,
                 9: -11.0 / 1024.0, 11: 5.0 / 12288.0}


def closed_form_F(model: str, s) -> np.ndarray:
    """Normalized overlap polynomials of the quartic-bump profile.

    For the reduced distance s = d / R (R the support radius) the overlap of
    shifted bump copies is a polynomial with a hard cutoff at s = 2:

        grw : 1 - 7/4 s^2 + 35/32 s^3 - 7/64 s^5 + 3/512 s^7
        csl : 1 - 11/6 s^2 + 33/16 s^4 - 77/64 s^5 + 33/256 s^7
                - 11/1024 s^9 + 5/12288 s^11
    """
    model = str(model).lower()
    if model not in (GRW_MODEL, CSL_MODEL):
        raise UnsupportedKindError(f"closed-form overlap defined for grw/csl, not {model!r}")
    coeffs = _F_GRW_COEFFS if model == GRW_MODEL else _F_CSL_COEFFS
    s = np.asarray(s, dtype=float)
    out = np.ones(s.shape)
    for power, c in coeffs.items():
        out = out + c * s**power
    return np.where(s < 2.0, out, 0.0)


# -- rigid bodies ----------------------------------------------------------------


def smear_density(rho: MassDensity, g: RadialProfile, n_points: int = 400) -> MassDensity:
    """Mass density convolved with a smearing distribution."""
    smeared = radial_convolution(rho, g, n_points=n_points)
    return MassDensity(smeared.grid, smeared.values, rho.total_mass,
                       support_radius=smeared.support_radius,
                       panel_grid=smeared.panel_grid, mass_rtol=1e-4)


def rigid_body_rate(rho: MassDensity, correlator, d: float,
                    params: ModelParams | None = None) -> float:
    """Center-of-mass decoherence rate of a rigid body at separation d.

    With the white-noise (delta) correlator the rate reduces to

        (gamma / m0^2) * [ int rho^2 - int rho rho(. + d) ],

    computed exactly in real space.  For a general radial correlator the
    k-space form 4 pi int k^2 gamma~(k) rho~(k)^2 [1 - j0(k d)] dk is used.
    """
    from .hybrid import Correlator

    if not isinstance(correlator, Correlator):
        raise TypeError("correlator must be a Correlator instance")
    if d < 0:
        raise ValueError("separation must be non-negative")
    pars = params or correlator.params
    if correlator.kind == "csl-delta":
        pref = pars.gamma_csl / pars.m0**2
        if d == 0.0:
            return 0.0
        k_self = overlap_k(rho).value
        return pref * (k_self - radial_overlap(rho, rho, d))
    # general kernel, spherically averaged in k-space
    if d == 0.0:
        return 0.0
    r_scale = max(rho.support_radius or rho.r_max, 0.4 * d)

    def integrand(k):
        rt = radial_fourier_values(rho, k)
        return 4.0 * np.pi * k**2 * correlator.evaluate(k) * rt**2 * one_minus_j0(k * d)

    return _octave_integrate(integrand, r_scale)


# -- hybrid single-particle curve ----------------------------------------------------


def hybrid_single_particle_curve(gamma_c, g_c: RadialProfile, g_g: RadialProfile,
                                 mass: float, ds, params: ModelParams | None = None,
                                 rtol: float = 1e-8) -> DecoherenceCurve:
    """Spherically averaged decoherence rate of the measurement-plus-feedback
    dynamics for a single particle of the given mass.

    Gamma(d) = 4 pi m^2 int dk k^2 [ gamma~_C(k) g~_C(k)^2
               + V~(k)^2 / (4 hbar^2 gamma~_C(k)) g~_G(k)^2 ] [1 - j0(k d)]

    with V~(k) = -4 pi G / k^2 the plain transform of the pair potential.
    """
    from .hybrid import Correlator

    if not isinstance(gamma_c, Correlator):
        raise TypeError("gamma_c must be a Correlator instance")
    pars = params or gamma_c.params
    ds = np.asarray(ds, dtype=float)
    r_scale = max(g_c.support_radius or g_c.r_max, g_g.support_radius or g_g.r_max)

    def weight(k):
        gam = gamma_c.evaluate(k)
        bad = ~(gam > 0.0)
        if np.any(bad):
            raise ZeroDivisionError(
                f"measurement correlator vanishes at k = {k[bad][:5].tolist()}; "
                "feedback term undefined")
        gtc = radial_fourier_values(g_c, k)
        gtg = radial_fourier_values(g_g, k)
        v_sq = (4.0 * np.pi * pars.g_newton) ** 2 / k**4
        return 4.0 * np.pi * mass**2 * k**2 * (
            gam * gtc**2 + v_sq / (4.0 * pars.hbar**2 * gam) * gtg**2)

    try:
        asymptote = _octave_integrate(weight, r_scale, rtol=rtol)
    except DivergenceError:
        # an infrared-divergent weight (e.g. white measurement noise with
        # bare gravitational feedback) has no finite large-d limit even
        # though every finite-d rate exists
        asymptote = math.inf
    rates = np.empty(ds.shape)
    for i, d in enumerate(ds):
        if d == 0.0:
            rates[i] = 0.0
            continue
        rates[i] = _octave_integrate(lambda k: weight(k) * one_minus_j0(k * d),
                                     max(r_scale, 0.4 * d), k_start=1e-6, rtol=rtol)
    return DecoherenceCurve(distances=ds, rates=rates, model=HYBRID_MODEL,
                            asymptote=asymptote)


# -- adaptive oscillation-aware k integration ----------------------------------------


def _octave_integrate(fn, r_scale: float, k_start: float = 1e-4, rtol: float = 1e-8,
                      max_octaves: int = 40) -> float:
    """Integrate fn(k) over (0, infinity) on octave blocks of oscillation-
    resolving Gauss-Lobatto panels, with a geometric tail completion.

    Raises DivergenceError when the octave contributions stop decreasing.
    """
    from .grids import gauss_lobatto

    x_ref, w_ref = gauss_lobatto(8)
    width = math.pi / (2.0 * r_scale)

    def block(a, b):
        n_panels = max(2, int(math.ceil((b - a) / width)))
        edges = np.linspace(a, b, n_panels + 1)
        halves = 0.5 * np.diff(edges)
        nodes = edges[:-1, None] + (x_ref[None, :] + 1.0) * halves[:, None]
        vals = fn(nodes.ravel()).reshape(nodes.shape)
        return float(np.sum((vals @ w_ref) * halves))

    k1 = max(1.0 / r_scale, 10.0 * k_start)
    total = block(k_start, k1)
    contribs: list[float] = []
    a = k1
    quiet = 0
    for _ in range(max_octaves):
        contrib = block(a, 2.0 * a)
        total += contrib
        a *= 2.0
        scale = max(abs(total), 1e-300)
        if abs(contrib) <= rtol * scale:
            # tail already negligible; a second quiet octave guards against
            # landing on an oscillation node
            quiet += 1
            if quiet >= 2:
                return total
            contribs.clear()
            continue
        quiet = 0
        contribs.append(contrib)
        if len(contribs) >= 3:
            q1 = contribs[-2] / contribs[-3]
            q2 = contribs[-1] / contribs[-2]
            if 0.0 < q1 < 0.9 and 0.0 < q2 < 0.9:
                # power-law tail: octave integrals shrink geometrically, so
                # the remainder sums to contrib * q / (1 - q); the drift of
                # q between octaves bounds the extrapolation error
                tail = contrib * q2 / (1.0 - q2)
                err_est = 2.0 * abs(tail) * abs(q2 - q1) / (1.0 - q2)
                if abs(tail) <= 1e-2 * scale and err_est <= max(rtol, 1e-12) * scale:
                    return total + tail
    raise DivergenceError("k-integral did not converge within the octave budget")
