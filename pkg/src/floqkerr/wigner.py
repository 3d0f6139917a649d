"""Wigner distributions on phase-space grids and their overlap with classical attractors.

Phase-space convention: alpha = x + i p. The Wigner value at alpha is

    W(alpha) = (2/pi) sum_{m,n} rho_{mn} w_{nm}(alpha)

with the closed-form Fock kernel, for n >= m,

    w_{nm}(alpha) = (-1)^m sqrt(m!/n!) (2 conj(alpha))^(n-m)
                    exp(-2|alpha|^2) L_m^{n-m}(4|alpha|^2)

and w_{mn} = conj(w_{nm}). Evaluation uses an upward recurrence in m for the
associated Laguerre polynomials (pre-scaled by the Gaussian to keep
intermediates bounded) and log-space factorial ratios, so large cutoffs do
not overflow. The (m, n) and (n, m) contributions combine to a real number
for Hermitian input; the residual imaginary part is checked against 1e-10
before being discarded.

For comparisons against classical densities the negative Wigner mass is
clipped; its magnitude is reported separately by negativity() as a
quantumness diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter
from scipy.spatial import cKDTree
from scipy.special import gammaln

from .errors import EmptyOrbit
from .fock import DensityMatrix

IMAG_RESIDUE_TOL = 1e-10
BOUNDARY_SUPPORT_FRACTION = 1e-4
INTEGRAL_SLACK = 0.02


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform rectangular grid over [x_min, x_max] x [p_min, p_max]."""

    x_min: float
    x_max: float
    p_min: float
    p_max: float
    n_x: int = 201
    n_p: int = 201

    def __post_init__(self):
        if self.n_x < 16 or self.n_p < 16:
            raise ValueError("grids below 16 points per axis are not supported")
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise ValueError("grid ranges must be non-degenerate")

    @classmethod
    def square(cls, half_width: float, points: int = 201) -> "PhaseGrid":
        return cls(-half_width, half_width, -half_width, half_width, points, points)

    @classmethod
    def for_occupation(cls, mean_occupation: float, points: int = 201) -> "PhaseGrid":
        """Auto-sized grid: +/- 1.5 * (sqrt(<n>) + 3) in both quadratures."""
        half = 1.5 * (np.sqrt(max(float(mean_occupation), 0.0)) + 3.0)
        return cls.square(half, points)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_x)

    @property
    def ps(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.n_p)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_x - 1)

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / (self.n_p - 1)

    @property
    def cell_area(self) -> float:
        return self.dx * self.dp

    def mesh(self):
        return np.meshgrid(self.xs, self.ps, indexing="ij")


@dataclass
class WignerMap:
    """Real Wigner values sampled on a PhaseGrid; values[i, j] is W(x_i + i p_j)."""

    grid: PhaseGrid
    values: np.ndarray
    integral: float
    contains_support: bool


def wigner(rho: DensityMatrix, grid: PhaseGrid) -> WignerMap:
    """Evaluate the Wigner distribution of rho on the grid."""
    d = rho.space.dim
    mat = rho.matrix
    x, p = grid.mesh()
    u = 4.0 * (x * x + p * p)
    gauss = np.exp(-0.5 * u)  # exp(-2|alpha|^2)
    two_abar = 2.0 * (x - 1j * p)

    m = np.arange(d, dtype=float)
    signs = (-1.0) ** np.arange(d)
    acc = np.zeros_like(u, dtype=complex)
    pow_abar = np.ones_like(two_abar)
    for k in range(d):
        n_terms = d - k
        # sqrt(m!/(m+k)!) via log-gamma, stable at any cutoff
        coeff = np.exp(0.5 * (gammaln(m[:n_terms] + 1.0) - gammaln(m[:n_terms] + k + 1.0)))
        upper = mat[np.arange(n_terms), np.arange(n_terms) + k]  # rho[m, m+k]
        lower = mat[np.arange(n_terms) + k, np.arange(n_terms)]  # rho[m+k, m]
        cu = signs[:n_terms] * coeff * upper
        cl = signs[:n_terms] * coeff * lower

        # Gaussian-scaled Laguerre recurrence: lag_m = L_m^k(u) * exp(-u/2)
        lag_prev = gauss
        sum_upper = cu[0] * lag_prev
        sum_lower = cl[0] * lag_prev
        if n_terms > 1:
            lag = (1.0 + k - u) * gauss
            sum_upper = sum_upper + cu[1] * lag
            sum_lower = sum_lower + cl[1] * lag
            for mm in range(1, n_terms - 1):
                lag_next = ((2.0 * mm + 1.0 + k - u) * lag - (mm + k) * lag_prev) / (mm + 1.0)
                lag_prev, lag = lag, lag_next
                sum_upper = sum_upper + cu[mm + 1] * lag
                sum_lower = sum_lower + cl[mm + 1] * lag
        if k == 0:
            acc += sum_upper  # diagonal counted once
        else:
            acc += sum_upper * pow_abar.conj() + sum_lower * pow_abar
        pow_abar = pow_abar * two_abar

    # pow_abar tracks (2 conj(alpha))^k through .conj(); residual imaginary part
    # measures Hermiticity violations of the input
    resid = float(np.max(np.abs(acc.imag)))
    if resid > IMAG_RESIDUE_TOL:
        raise ValueError(f"Wigner kernel sum has imaginary residue {resid:.3e}")
    values = (2.0 / np.pi) * acc.real
    integral = float(values.sum() * grid.cell_area)

    edge = max(
        np.abs(values[0, :]).max(),
        np.abs(values[-1, :]).max(),
        np.abs(values[:, 0]).max(),
        np.abs(values[:, -1]).max(),
    )
    contains = bool(edge < BOUNDARY_SUPPORT_FRACTION * np.abs(values).max())
    return WignerMap(grid=grid, values=values, integral=integral, contains_support=contains)


def negativity(wmap: WignerMap) -> float:
    """Integrated magnitude of the negative Wigner mass."""
    return float(np.sum(np.abs(np.minimum(wmap.values, 0.0))) * wmap.grid.cell_area)


def _orbit_points(orbit) -> np.ndarray:
    pts = np.asarray(getattr(orbit, "samples", orbit), dtype=complex).ravel()
    pts = pts[np.isfinite(pts)]
    if pts.size == 0:
        raise EmptyOrbit("orbit has no finite samples")
    return pts


def attractor_overlap(wmap: WignerMap, orbit, radius: float) -> float:
    """Fraction of the positive Wigner mass within `radius` of the orbit.

    The region is the union of disks centered on the post-transient
    stroboscopic points; both masses are grid Riemann sums.
    """
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    pts = _orbit_points(orbit)
    x, p = wmap.grid.mesh()
    grid_xy = np.column_stack([x.ravel(), p.ravel()])
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    dist, _ = tree.query(grid_xy, k=1)
    inside = (dist <= radius).reshape(x.shape)
    positive = np.maximum(wmap.values, 0.0)
    total = positive.sum()
    if total <= 0:
        raise ValueError("Wigner map has no positive mass")
    return float(positive[inside].sum() / total)


def _bhattacharyya(dens_a: np.ndarray, dens_b: np.ndarray, cell_area: float) -> float:
    return float(np.sum(np.sqrt(dens_a * dens_b)) * cell_area)


def distribution_distance(wmap: WignerMap, orbit, bandwidth: float) -> float:
    """Bhattacharyya coefficient between the smoothed classical and quantum densities.

    The classical density is a Gaussian kernel estimate (stroboscopic
    frequency weighting) of the orbit points on the grid; the quantum density
    is the clipped Wigner map. Both are smoothed with the same kernel and
    renormalized, so the local averaging treats the two sides symmetrically.
    """
    if bandwidth <= 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    pts = _orbit_points(orbit)
    if pts.size < 100:
        raise ValueError(f"need >= 100 post-transient points, got {pts.size}")
    grid = wmap.grid
    edges_x = np.linspace(grid.x_min - grid.dx / 2, grid.x_max + grid.dx / 2, grid.n_x + 1)
    edges_p = np.linspace(grid.p_min - grid.dp / 2, grid.p_max + grid.dp / 2, grid.n_p + 1)
    hist, _, _ = np.histogram2d(pts.real, pts.imag, bins=(edges_x, edges_p))

    sigma_cells = (bandwidth / grid.dx, bandwidth / grid.dp)
    classical = gaussian_filter(hist, sigma_cells, mode="constant")
    quantum = gaussian_filter(np.maximum(wmap.values, 0.0), sigma_cells, mode="constant")

    norm_c = classical.sum() * grid.cell_area
    norm_q = quantum.sum() * grid.cell_area
    if norm_c <= 0 or norm_q <= 0:
        raise ValueError("a density vanished after smoothing; grid too small?")
    return _bhattacharyya(classical / norm_c, quantum / norm_q, grid.cell_area)


def write_csv(wmap: WignerMap, path) -> None:
    """Serialize as CSV rows x,p,w (the sidecar is written by the caller)."""
    x, p = wmap.grid.mesh()
    data = np.column_stack([x.ravel(), p.ravel(), wmap.values.ravel()])
    header = "x,p,w"
    np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.12g")
