"""Radial smearing distributions and classical mass densities.

A smearing distribution is a non-negative radial function g(r) subject to
the normalization and variance constraints

    4*pi * int r^2 g dr = 1,        4*pi * int r^4 g dr = 3 * r_c^2.

Everything here is dimensionless with the smearing length r_c as the unit
of length (values then carry r_c^-3); physical units are re-attached only
at the command-line layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainTruncationError, InvalidProfileError, InvalidScaleError
from .grids import RadialGrid

GAUSSIAN = "gaussian"
CSL_OPTIMAL = "csl-optimal"
DP_OPTIMAL = "dp-optimal"

PROFILE_KINDS = (GAUSSIAN, CSL_OPTIMAL, DP_OPTIMAL)

#: default truncation radius for profiles without compact support, in units
#: of r_c; the Gaussian mass beyond 10 sigma is far below 1e-20
GAUSSIAN_R_MAX_FACTOR = 10.0

_PROFILE_HEADER = "# minheat-profile v1"


@dataclass(frozen=True)
class ClosedFormProfile:
    """Analytic smearing family: Gaussian, quartic bump, or quadratic bump.

    gaussian    : g(x) = (2 pi r_c^2)^(-3/2) exp(-x^2 / 2 r_c^2)
    csl-optimal : g(x) = 105/(32 pi (3 r_c)^7) * [9 r_c^2 - x^2]_+^2
    dp-optimal  : g(x) = 15/(8 pi (sqrt7 r_c)^5) * [7 r_c^2 - x^2]_+

    All three are normalized with variance 3 r_c^2.
    """

    kind: str
    r_c: float = 1.0

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.r_c <= 0:
            raise ValueError("r_c must be positive")

    @property
    def support_radius(self) -> float | None:
        if self.kind == CSL_OPTIMAL:
            return 3.0 * self.r_c
        if self.kind == DP_OPTIMAL:
            return math.sqrt(7.0) * self.r_c
        return None

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        rc = self.r_c
        if self.kind == GAUSSIAN:
            return (2.0 * np.pi * rc**2) ** -1.5 * np.exp(-(r**2) / (2.0 * rc**2))
        if self.kind == CSL_OPTIMAL:
            amp = 105.0 / (32.0 * np.pi * (3.0 * rc) ** 7)
            return amp * np.maximum(9.0 * rc**2 - r**2, 0.0) ** 2
        amp = 15.0 / (8.0 * np.pi * (math.sqrt(7.0) * rc) ** 5)
        return amp * np.maximum(7.0 * rc**2 - r**2, 0.0)


class RadialProfile:
    """A sampled non-negative radial function on [0, r_max].

    Attributes
    ----------
    grid : strictly increasing radii with grid[0] = 0
    values : g(grid), all >= 0
    support_radius : optional radius beyond which g vanishes identically
    panel_grid : the quadrature grid the samples live on, when available
    evaluator : optional exact callable behind the samples; refinement
        and resampling use it instead of interpolating
    """

    __slots__ = ("grid", "values", "support_radius", "panel_grid", "evaluator")

    def __init__(self, grid, values, support_radius=None, panel_grid=None, evaluator=None):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise InvalidProfileError("grid and values must be 1-D arrays of equal length")
        if grid.size < 2:
            raise InvalidProfileError("profile needs at least two samples")
        if grid[0] != 0.0:
            raise InvalidProfileError("grid must start at r = 0")
        if np.any(np.diff(grid) <= 0):
            raise InvalidProfileError("grid must be strictly increasing")
        if np.any(values < 0):
            raise InvalidProfileError("profile values must be non-negative")
        if np.any(~np.isfinite(values)):
            raise InvalidProfileError("profile values must be finite")
        if support_radius is not None:
            support_radius = float(support_radius)
            if support_radius <= 0:
                raise InvalidProfileError("support_radius must be positive")
            if np.any(values[grid > support_radius] != 0.0):
                raise InvalidProfileError("values must vanish beyond support_radius")
        grid.setflags(write=False)
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self.support_radius = support_radius
        self.panel_grid = panel_grid
        self.evaluator = evaluator

    # -- construction --------------------------------------------------------

    @classmethod
    def from_callable(cls, fn, panel_grid: RadialGrid, support_radius=None) -> "RadialProfile":
        vals = np.maximum(np.asarray(fn(panel_grid.r), dtype=float), 0.0)
        if support_radius is not None:
            vals = np.where(panel_grid.r > support_radius, 0.0, vals)
        return cls(panel_grid.r, vals, support_radius=support_radius,
                   panel_grid=panel_grid, evaluator=fn)

    # -- evaluation ------------------------------------------------------------

    @property
    def r_max(self) -> float:
        return float(self.grid[-1])

    def evaluate(self, r) -> np.ndarray:
        """Profile values at arbitrary radii (zero outside the domain/support)."""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        if self.evaluator is not None:
            out = np.asarray(self.evaluator(r), dtype=float)
        elif self.panel_grid is not None:
            out = self.panel_grid.interpolate(self.values, r)
        else:
            out = np.interp(r, self.grid, self.values, left=self.values[0], right=0.0)
        out = np.maximum(out, 0.0)
        cutoff = self.r_max if self.support_radius is None else min(self.support_radius, self.r_max)
        out = np.where(r > cutoff, 0.0, out)
        return float(out[0]) if scalar else out

    def resampled(self, panel_grid: RadialGrid) -> "RadialProfile":
        """Same function sampled on another quadrature grid."""
        fn = self.evaluator if self.evaluator is not None else self.evaluate
        return RadialProfile.from_callable(fn, panel_grid, support_radius=self.support_radius)

    # -- quadrature -------------------------------------------------------------

    def norm(self) -> float:
        """4*pi * int r^2 g dr."""
        if self.panel_grid is not None:
            return self.panel_grid.radial_integral(self.values)
        return float(np.trapezoid(4.0 * np.pi * self.grid**2 * self.values, self.grid))

    def second_moment(self) -> float:
        """4*pi * int r^4 g dr."""
        if self.panel_grid is not None:
            return self.panel_grid.second_moment(self.values)
        return float(np.trapezoid(4.0 * np.pi * self.grid**4 * self.values, self.grid))

    def __repr__(self):
        sup = f", support_radius={self.support_radius:.6g}" if self.support_radius else ""
        return f"RadialProfile(n={self.grid.size}, r_max={self.r_max:.6g}{sup})"


class MassDensity(RadialProfile):
    """Spherically symmetric classical mass density with known total mass."""

    __slots__ = ("total_mass",)

    def __init__(self, grid, values, total_mass, support_radius=None,
                 panel_grid=None, evaluator=None, mass_rtol=1e-6):
        super().__init__(grid, values, support_radius=support_radius,
                         panel_grid=panel_grid, evaluator=evaluator)
        total_mass = float(total_mass)
        if total_mass <= 0:
            raise InvalidProfileError("total mass must be positive")
        integrated = self.norm()
        if not math.isclose(integrated, total_mass, rel_tol=mass_rtol):
            raise InvalidProfileError(
                f"integrated mass {integrated:.6g} != declared total mass {total_mass:.6g}")
        self.total_mass = total_mass

    @classmethod
    def uniform_sphere(cls, radius: float, mass: float = 1.0,
                       n_points: int = 200, nodes_per_panel: int = 8) -> "MassDensity":
        if radius <= 0:
            raise ValueError("radius must be positive")
        rho0 = 3.0 * mass / (4.0 * np.pi * radius**3)
        grid = RadialGrid.for_domain(radius, n_points=n_points, nodes_per_panel=nodes_per_panel)

        def fn(r):
            return np.where(np.asarray(r, dtype=float) <= radius, rho0, 0.0)

        vals = fn(grid.r)
        return cls(grid.r, vals, mass, support_radius=radius, panel_grid=grid, evaluator=fn)


# -- operations -----------------------------------------------------------------


def make_closed_form(form: ClosedFormProfile | str, n_points: int = 161,
                     r_max: float | None = None, nodes_per_panel: int = 8) -> RadialProfile:
    """Sample an analytic smearing family on a panel grid.

    For compact-support kinds the support edge is always a panel boundary,
    so the profile is panel-wise polynomial and its quadratures are exact.
    Raises DomainTruncationError when r_max does not cover the support.
    """
    if isinstance(form, str):
        form = ClosedFormProfile(form)
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    support = form.support_radius
    if r_max is None:
        r_max = support if support is not None else GAUSSIAN_R_MAX_FACTOR * form.r_c
    if support is not None and r_max < support * (1.0 - 1e-12):
        raise DomainTruncationError(
            f"r_max={r_max:.6g} truncates the support radius {support:.6g}")
    breakpoints = [support] if (support is not None and support < r_max) else []
    grid = RadialGrid.for_domain(r_max, n_points=n_points, breakpoints=breakpoints,
                                 nodes_per_panel=nodes_per_panel)
    return RadialProfile.from_callable(form, grid, support_radius=support)


def check_constraints(p: RadialProfile) -> tuple[float, float]:
    """Diagnostic (norm, variance) pair to compare against (1, 3 r_c^2)."""
    norm = p.norm()
    if norm == 0.0:
        return 0.0, float("nan")
    return norm, p.second_moment() / norm


def rescale(p: RadialProfile, alpha: float) -> RadialProfile:
    """Volume-preserving dilation h(r) = alpha^3 * g(alpha * r).

    Keeps the norm and multiplies the variance by alpha^-2.
    """
    alpha = float(alpha)
    if alpha <= 0:
        raise InvalidScaleError("rescale factor must be strictly positive")
    if alpha == 1.0:
        return p
    new_support = None if p.support_radius is None else p.support_radius / alpha
    scaled_vals = alpha**3 * p.values
    new_grid_r = p.grid / alpha

    evaluator = None
    if p.evaluator is not None:
        base = p.evaluator
        evaluator = lambda r: alpha**3 * np.asarray(base(alpha * np.asarray(r, dtype=float)))
    panel_grid = p.panel_grid.scaled(1.0 / alpha) if p.panel_grid is not None else None
    if evaluator is None and p.panel_grid is not None:
        src_grid, src_vals = p.panel_grid, p.values
        evaluator = lambda r: alpha**3 * src_grid.interpolate(src_vals, alpha * np.asarray(r, dtype=float))
    return RadialProfile(new_grid_r, scaled_vals, support_radius=new_support,
                         panel_grid=panel_grid, evaluator=evaluator)


def decreasing_rearrangement(p: RadialProfile, n_shells: int | None = None) -> RadialProfile:
    """Symmetric decreasing rearrangement of a radial profile.

    Implemented by sorting (value, shell-volume) pairs over thin spherical
    shells, which preserves the volume integral by construction, then
    interpolating the sorted layer-cake back onto the original grid.
    """
    if n_shells is None:
        n_shells = max(12000, 32 * p.grid.size)
    edges = np.linspace(0.0, p.r_max, n_shells + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    vols = 4.0 * np.pi / 3.0 * np.diff(edges**3)
    vals = p.evaluate(centers)

    order = np.argsort(-vals, kind="stable")
    sorted_vals = vals[order]
    sorted_vols = vols[order]
    cum = np.concatenate(([0.0], np.cumsum(sorted_vols)))
    # volume-midpoint radius of each sorted shell
    r_mid = (0.5 * (cum[:-1] + cum[1:]) * 3.0 / (4.0 * np.pi)) ** (1.0 / 3.0)

    new_vals = np.interp(p.grid, r_mid, sorted_vals, left=sorted_vals[0], right=0.0)
    new_vals = np.maximum(new_vals, 0.0)
    # enforce monotone non-increasing output against interpolation jitter
    new_vals = np.minimum.accumulate(new_vals)

    positive = sorted_vals > 0.0
    if positive.all():
        support = None
    else:
        vol_positive = cum[np.nonzero(~positive)[0][0]] if (~positive).any() else cum[-1]
        support = min((vol_positive * 3.0 / (4.0 * np.pi)) ** (1.0 / 3.0), p.r_max)
        support = support if support > 0 else None
        if support is not None:
            new_vals = np.where(p.grid > support, 0.0, new_vals)
    return RadialProfile(p.grid, new_vals, support_radius=support, panel_grid=p.panel_grid)


def sqrt_profile(p: RadialProfile) -> RadialProfile:
    """Pointwise square root sqrt(g); used by the amplitude-level functionals."""
    evaluator = None
    if p.evaluator is not None:
        base = p.evaluator
        evaluator = lambda r: np.sqrt(np.maximum(np.asarray(base(r), dtype=float), 0.0))
    elif p.panel_grid is not None:
        src_grid, src_vals = p.panel_grid, p.values
        evaluator = lambda r: np.sqrt(np.maximum(src_grid.interpolate(src_vals, np.asarray(r, dtype=float)), 0.0))
    return RadialProfile(p.grid, np.sqrt(p.values), support_radius=p.support_radius,
                         panel_grid=p.panel_grid, evaluator=evaluator)


def random_feasible_profile(rng: np.random.Generator, r_max: float = 8.0,
                            n_points: int = 161, n_bumps: int = 3,
                            nodes_per_panel: int = 8) -> RadialProfile:
    """Random smooth profile satisfying the norm and variance constraints.

    A positive mixture of radial Gaussian bumps is normalized and then
    dilated so its variance lands exactly on 3; useful for property tests
    and for certifying global minima against random feasible competitors.
    """
    amps = rng.uniform(0.2, 1.0, size=n_bumps)
    cents = rng.uniform(0.0, 0.35 * r_max, size=n_bumps)
    widths = rng.uniform(0.08 * r_max, 0.15 * r_max, size=n_bumps)

    def mixture(r):
        r = np.asarray(r, dtype=float)[..., None]
        return np.sum(amps * np.exp(-((r - cents) ** 2) / (2.0 * widths**2)), axis=-1)

    grid = RadialGrid.for_domain(r_max, n_points=n_points, nodes_per_panel=nodes_per_panel)
    # fixed-point projection onto the constraint set: renormalize and dilate
    # until the grid-measured norm and variance settle on (1, 3)
    alpha, scale = 1.0, 1.0

    def feasible(r):
        return scale * alpha**3 * mixture(alpha * np.asarray(r, dtype=float))

    for _ in range(5):
        vals = feasible(grid.r)
        norm = grid.radial_integral(vals)
        var = grid.second_moment(vals) / norm
        scale /= norm
        alpha *= math.sqrt(var / 3.0)
    return RadialProfile.from_callable(feasible, grid)


# -- file format ------------------------------------------------------------------


def save_profile(p: RadialProfile, path) -> None:
    """Write the two-column text format (header `# minheat-profile v1`)."""
    lines = [_PROFILE_HEADER]
    if p.support_radius is not None:
        lines.append(f"# support_radius = {p.support_radius:.17g}")
    for r, v in zip(p.grid, p.values):
        lines.append(f"{r:.17g} {v:.17g}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_profile(path) -> RadialProfile:
    """Read the two-column text format written by save_profile."""
    support = None
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first.strip() != _PROFILE_HEADER:
            raise InvalidProfileError(f"not a minheat profile file: {path}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.startswith("support_radius"):
                    support = float(body.split("=", 1)[1])
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InvalidProfileError(f"malformed profile line: {line!r}")
            rows.append((float(parts[0]), float(parts[1])))
    if not rows:
        raise InvalidProfileError("profile file has no samples")
    arr = np.asarray(rows)
    return RadialProfile(arr[:, 0], arr[:, 1], support_radius=support)
