"""Composite Gauss-Lobatto panel grids on a radial interval [0, r_max].

All quadrature in the package runs on these grids.  Lobatto panels (rather
than interior-node Gauss panels) are used so that r = 0, r = r_max and any
requested breakpoint (e.g. the support edge of a compact profile, where
derivative kinks live) are actual grid nodes shared between panels.  A panel
with p nodes integrates polynomials of degree <= 2p - 3 exactly, so the
compact-support bump profiles and their low-order derived integrands are
handled without discretization error once their support edge is a panel
boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre


@lru_cache(maxsize=None)
def gauss_lobatto(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Lobatto rule on [-1, 1].

    Exact for polynomials of degree <= 2n - 3.  Endpoints are included.
    """
    if n < 2:
        raise ValueError("Gauss-Lobatto rule needs at least 2 nodes")
    if n == 2:
        return np.array([-1.0, 1.0]), np.array([1.0, 1.0])
    coeffs = np.zeros(n)
    coeffs[n - 1] = 1.0  # Legendre polynomial P_{n-1}
    interior = legendre.legroots(legendre.legder(coeffs))
    x = np.concatenate(([-1.0], np.sort(interior.real), [1.0]))
    w = 2.0 / (n * (n - 1) * legendre.legval(x, coeffs) ** 2)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def _barycentric_weights(n: int) -> np.ndarray:
    x, _ = gauss_lobatto(n)
    lam = np.ones(n)
    for i in range(n):
        lam[i] = 1.0 / np.prod(x[i] - np.delete(x, i))
    lam.setflags(write=False)
    return lam


@lru_cache(maxsize=None)
def _reference_diff_matrix(n: int) -> np.ndarray:
    """Differentiation matrix for the Gauss-Lobatto nodes on [-1, 1]."""
    x, _ = gauss_lobatto(n)
    lam = _barycentric_weights(n)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                d[i, j] = (lam[j] / lam[i]) / (x[i] - x[j])
        d[i, i] = -np.sum(d[i, np.arange(n) != i])
    d.setflags(write=False)
    return d


@lru_cache(maxsize=None)
def _reference_vandermonde_inv(n: int) -> np.ndarray:
    """Inverse Vandermonde: node values -> monomial coefficients in xi."""
    x, _ = gauss_lobatto(n)
    v = np.vander(x, increasing=True)
    inv = np.linalg.inv(v)
    inv.setflags(write=False)
    return inv


@dataclass
class RadialGrid:
    """Composite Gauss-Lobatto grid on [0, r_max].

    Attributes
    ----------
    r : global nodes, strictly increasing, r[0] = 0
    w : 1-D quadrature weights (shared panel-boundary nodes carry the sum
        of the two adjacent panel weights)
    panel_edges : panel boundaries, length n_panels + 1
    nodes_per_panel : p, nodes of each panel (panel k covers global indices
        k*(p-1) .. k*(p-1) + p - 1 inclusive)
    """

    r: np.ndarray
    w: np.ndarray
    panel_edges: np.ndarray
    nodes_per_panel: int
    _vol_w: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for a in (self.r, self.w, self.panel_edges):
            a.setflags(write=False)
        vol = 4.0 * np.pi * self.r**2 * self.w
        vol.setflags(write=False)
        object.__setattr__(self, "_vol_w", vol)

    # -- construction -----------------------------------------------------

    @classmethod
    def from_panels(cls, panel_edges, nodes_per_panel: int = 8) -> "RadialGrid":
        edges = np.asarray(sorted(set(float(e) for e in panel_edges)))
        if edges.size < 2:
            raise ValueError("need at least two panel edges")
        if edges[0] < 0:
            raise ValueError("panel edges must be non-negative")
        p = int(nodes_per_panel)
        x_ref, w_ref = gauss_lobatto(p)
        n_panels = edges.size - 1
        n = n_panels * (p - 1) + 1
        r = np.empty(n)
        w = np.zeros(n)
        for k in range(n_panels):
            a, b = edges[k], edges[k + 1]
            half = 0.5 * (b - a)
            lo = k * (p - 1)
            r[lo : lo + p] = a + (x_ref + 1.0) * half
            w[lo : lo + p] += w_ref * half
        r[0] = edges[0]
        r[-1] = edges[-1]
        return cls(r=r, w=w, panel_edges=edges, nodes_per_panel=p)

    @classmethod
    def for_domain(
        cls,
        r_max: float,
        n_points: int = 200,
        breakpoints=(),
        nodes_per_panel: int = 8,
    ) -> "RadialGrid":
        """Grid on [0, r_max] with roughly n_points nodes.

        Panels are distributed over the base intervals set by the given
        breakpoints (support edges and the like), proportionally to interval
        length, so every breakpoint stays a panel boundary.
        """
        if r_max <= 0:
            raise ValueError("r_max must be positive")
        p = int(nodes_per_panel)
        base = sorted({0.0, float(r_max)} | {float(b) for b in breakpoints if 0.0 < b < r_max})
        n_base = len(base) - 1
        total_panels = max(n_base, int(np.ceil(max(n_points - 1, p - 1) / (p - 1))))
        lengths = np.diff(np.asarray(base))
        # largest-remainder allocation, at least one panel per base interval
        raw = lengths / lengths.sum() * total_panels
        counts = np.maximum(np.floor(raw).astype(int), 1)
        while counts.sum() < total_panels:
            counts[np.argmax(raw - counts)] += 1
        edges = []
        for (a, b), m in zip(zip(base[:-1], base[1:]), counts):
            edges.extend(np.linspace(a, b, m + 1)[:-1])
        edges.append(base[-1])
        return cls.from_panels(edges, nodes_per_panel=p)

    # -- basic queries -----------------------------------------------------

    @property
    def n_points(self) -> int:
        return self.r.size

    @property
    def n_panels(self) -> int:
        return self.panel_edges.size - 1

    @property
    def r_max(self) -> float:
        return float(self.panel_edges[-1])

    @property
    def vol_w(self) -> np.ndarray:
        """Volume weights 4*pi*r^2*w for integrals of radial functions over R^3."""
        return self._vol_w

    def panel_slice(self, k: int) -> slice:
        p = self.nodes_per_panel
        lo = k * (p - 1)
        return slice(lo, lo + p)

    # -- quadrature --------------------------------------------------------

    def integrate(self, values: np.ndarray) -> float:
        """Plain 1-D integral over [0, r_max]."""
        return float(self.w @ np.asarray(values))

    def radial_integral(self, values: np.ndarray) -> float:
        """Integral of a radial function over R^3: 4*pi * int r^2 f dr."""
        return float(self._vol_w @ np.asarray(values))

    def second_moment(self, values: np.ndarray) -> float:
        """4*pi * int r^4 f dr."""
        return float((self._vol_w * self.r**2) @ np.asarray(values))

    # -- derivatives and quadratic forms ------------------------------------

    def panel_derivative(self, values: np.ndarray, k: int) -> np.ndarray:
        """Derivative of the panel interpolant at the nodes of panel k."""
        sl = self.panel_slice(k)
        a, b = self.panel_edges[k], self.panel_edges[k + 1]
        d = _reference_diff_matrix(self.nodes_per_panel) * (2.0 / (b - a))
        return d @ np.asarray(values)[sl]

    def dirichlet_energy(self, values: np.ndarray) -> float:
        """2*pi * int r^2 f'(r)^2 dr, evaluated panel by panel.

        Derivatives never cross panel boundaries, so a kink placed on a
        panel edge contributes its one-sided derivatives correctly.
        """
        values = np.asarray(values)
        p = self.nodes_per_panel
        x_ref, w_ref = gauss_lobatto(p)
        d_ref = _reference_diff_matrix(p)
        total = 0.0
        for k in range(self.n_panels):
            a, b = self.panel_edges[k], self.panel_edges[k + 1]
            half = 0.5 * (b - a)
            sl = self.panel_slice(k)
            dv = (d_ref / half) @ values[sl]
            total += (w_ref * half) @ (self.r[sl] ** 2 * dv**2)
        return 2.0 * np.pi * total

    def dirichlet_matrix(self) -> np.ndarray:
        """Symmetric matrix A with v @ A @ v == dirichlet_energy(v)."""
        p = self.nodes_per_panel
        x_ref, w_ref = gauss_lobatto(p)
        d_ref = _reference_diff_matrix(p)
        n = self.n_points
        a_mat = np.zeros((n, n))
        for k in range(self.n_panels):
            a, b = self.panel_edges[k], self.panel_edges[k + 1]
            half = 0.5 * (b - a)
            sl = self.panel_slice(k)
            d_loc = d_ref / half
            w_loc = (w_ref * half) * self.r[sl] ** 2
            a_mat[sl, sl] += 2.0 * np.pi * d_loc.T @ (w_loc[:, None] * d_loc)
        return 0.5 * (a_mat + a_mat.T)

    # -- interpolation -------------------------------------------------------

    def interpolate(self, values: np.ndarray, r_new) -> np.ndarray:
        """Barycentric panel-polynomial interpolation; zero outside [0, r_max]."""
        values = np.asarray(values, dtype=float)
        rq = np.atleast_1d(np.asarray(r_new, dtype=float))
        out = np.zeros(rq.shape)
        inside = (rq >= 0.0) & (rq <= self.r_max)
        if not inside.any():
            return out if np.ndim(r_new) else float(out[0])
        p = self.nodes_per_panel
        x_ref, _ = gauss_lobatto(p)
        lam = _barycentric_weights(p)
        idx = np.clip(np.searchsorted(self.panel_edges, rq[inside], side="right") - 1, 0, self.n_panels - 1)
        ri = rq[inside]
        res = np.empty(ri.shape)
        for k in np.unique(idx):
            mask = idx == k
            a, b = self.panel_edges[k], self.panel_edges[k + 1]
            xi = (2.0 * ri[mask] - (a + b)) / (b - a)
            sl = self.panel_slice(k)
            diff = xi[:, None] - x_ref[None, :]
            exact_row, exact_col = np.nonzero(diff == 0.0)
            diff[exact_row, :] = 1.0  # placeholder, overwritten below
            weights = lam[None, :] / diff
            vals = (weights @ values[sl]) / weights.sum(axis=1)
            if exact_row.size:
                vals[exact_row] = values[sl][exact_col]
            res[mask] = vals
        out[inside] = res
        return out if np.ndim(r_new) else float(out[0])

    # -- derived grids ---------------------------------------------------------

    def refine(self, factor: int = 2) -> "RadialGrid":
        """Split every panel into `factor` equal sub-panels."""
        if factor < 1:
            raise ValueError("factor must be >= 1")
        edges = []
        for k in range(self.n_panels):
            a, b = self.panel_edges[k], self.panel_edges[k + 1]
            edges.extend(np.linspace(a, b, factor + 1)[:-1])
        edges.append(self.panel_edges[-1])
        return RadialGrid.from_panels(edges, nodes_per_panel=self.nodes_per_panel)

    def scaled(self, scale: float) -> "RadialGrid":
        """Grid with all radii multiplied by `scale` (same panel structure)."""
        if scale <= 0:
            raise ValueError("scale must be positive")
        return RadialGrid.from_panels(self.panel_edges * scale, nodes_per_panel=self.nodes_per_panel)

    def panel_monomial_coefficients(self, values: np.ndarray) -> list[tuple[float, float, np.ndarray]]:
        """Per panel (midpoint, half-width, coeffs) with f(xi) = sum c_m xi^m.

        xi is the panel-local coordinate in [-1, 1].  Used by the exact
        oscillatory transforms.
        """
        values = np.asarray(values, dtype=float)
        vinv = _reference_vandermonde_inv(self.nodes_per_panel)
        out = []
        for k in range(self.n_panels):
            a, b = self.panel_edges[k], self.panel_edges[k + 1]
            sl = self.panel_slice(k)
            out.append((0.5 * (a + b), 0.5 * (b - a), vinv @ values[sl]))
        return out
