"""Densities on [0, 1], the warping action, and the cheap initial estimators.

The action of a warping ``gamma`` on a density ``f`` is
``(f, gamma) = (f o gamma) * gamma'``. It needs no normalizing constant in
the continuum; on the grid the result is renormalized to absorb quadrature
error.
"""

from dataclasses import dataclass

import numpy as np

from .grid import Grid, cumulative_trapezoid, trapezoid_integral
from .sphere import WarpingFunction

PDF_FLOOR = 1e-8
_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class DensityFunction:
    """Strictly positive pdf samples on ``grid`` with the matching CDF table."""

    pdf: np.ndarray
    cdf: np.ndarray
    grid: Grid

    @classmethod
    def from_pdf(cls, values, grid: Grid) -> "DensityFunction":
        """Normalize positive samples to unit trapezoid mass and tabulate the CDF."""
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.T,):
            raise ValueError(f"expected {grid.T} pdf samples, got shape {values.shape}")
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise ValueError("density samples must be finite and strictly positive")
        pdf = values / trapezoid_integral(values, grid)
        cdf = cumulative_trapezoid(pdf, grid)
        cdf /= cdf[-1]
        cdf[-1] = 1.0
        return cls(pdf, cdf, grid)

    @classmethod
    def uniform(cls, grid: Grid) -> "DensityFunction":
        return cls.from_pdf(np.ones(grid.T), grid)

    def __call__(self, t):
        """Piecewise-linear evaluation on [0, 1]; zero outside."""
        t = np.asarray(t, dtype=float)
        inside = (t >= 0.0) & (t <= 1.0)
        out = np.where(inside, np.interp(t, self.grid.points, self.pdf), 0.0)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SupportBounds:
    A: float
    B: float

    def __post_init__(self):
        if not self.A < self.B:
            raise ValueError(f"need A < B, got A={self.A}, B={self.B}")

    @property
    def width(self) -> float:
        return self.B - self.A


@dataclass(frozen=True)
class ScaledSample:
    """Observations mapped to (0, 1) by ``(x - A) / (B - A)``."""

    y: np.ndarray
    bounds: SupportBounds


def warp(f: DensityFunction, w: WarpingFunction) -> DensityFunction:
    """Warped density ``f(gamma(t)) * gamma'(t)``, renormalized on the grid."""
    values = np.interp(w.gamma, f.grid.points, f.pdf) * w.gamma_dot
    return DensityFunction.from_pdf(values, f.grid)


def warp_mass(f: DensityFunction, w: WarpingFunction) -> float:
    """Trapezoid mass of the warped density before renormalization."""
    return trapezoid_integral(np.interp(w.gamma, f.grid.points, f.pdf) * w.gamma_dot, f.grid)


def compose(w1: WarpingFunction, w2: WarpingFunction) -> WarpingFunction:
    """``w1 o w2`` with the chain-rule derivative ``w1'(w2(t)) * w2'(t)``."""
    pts = w1.grid.points
    gamma = np.interp(w2.gamma, pts, w1.gamma)
    gamma_dot = np.interp(w2.gamma, pts, w1.gamma_dot) * w2.gamma_dot
    return WarpingFunction(gamma, gamma_dot, w1.grid)


def invert(w: WarpingFunction) -> WarpingFunction:
    """Group inverse, by swapping the axes of the monotone table."""
    pts = w.grid.points
    gamma = np.interp(pts, w.gamma, pts)
    gamma_dot = 1.0 / np.interp(gamma, pts, w.gamma_dot)
    return WarpingFunction(gamma, gamma_dot, w.grid)


def turnbull_bounds(x) -> SupportBounds:
    """Support estimate ``[min - s/sqrt(n), max + s/sqrt(n)]`` with ``s`` the sample sd."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 2:
        raise ValueError("need at least two observations")
    s = np.std(x, ddof=1)
    if not s > 0:
        raise ValueError("degenerate sample: all observations are equal")
    pad = s / np.sqrt(x.size)
    return SupportBounds(float(x.min() - pad), float(x.max() + pad))


def scale_sample(x, bounds: SupportBounds) -> ScaledSample:
    x = np.asarray(x, dtype=float).ravel()
    y = (x - bounds.A) / bounds.width
    if np.any(y <= 0.0) or np.any(y >= 1.0):
        raise ValueError("observations must lie strictly inside the support bounds")
    return ScaledSample(y, bounds)


def unscale_density(f: DensityFunction, bounds: SupportBounds):
    """Grid and pdf values of ``f`` carried back to [A, B]."""
    x = bounds.A + bounds.width * f.grid.points
    return x, f.pdf / bounds.width


def normal_density_on_grid(mean: float, sd: float, grid: Grid) -> DensityFunction:
    """Normal(mean, sd) restricted and renormalized to [0, 1]."""
    if not sd > 0:
        raise ValueError("standard deviation must be positive")
    z = (grid.points - mean) / sd
    values = np.exp(-0.5 * z * z)
    return DensityFunction.from_pdf(np.maximum(values, PDF_FLOOR * values.max()), grid)


def truncated_normal_fit(sample: ScaledSample, grid: Grid) -> DensityFunction:
    """Normal density truncated to [0, 1] with the sample mean and sd as parameters."""
    y = np.asarray(sample.y, dtype=float)
    if y.size < 2:
        raise ValueError("need at least two observations")
    sd = np.std(y, ddof=1)
    if not sd > 0:
        raise ValueError("zero sample variance")
    return normal_density_on_grid(float(np.mean(y)), float(sd), grid)


def silverman_bandwidth(x) -> float:
    """``1.06 * sd * n^(-1/5)``."""
    x = np.asarray(x, dtype=float).ravel()
    return float(1.06 * np.std(x, ddof=1) * x.size ** (-0.2))


def gaussian_kde(data, points, bandwidth: float) -> np.ndarray:
    """Plain Gaussian kernel density estimate of ``data`` evaluated at ``points``."""
    data = np.asarray(data, dtype=float).ravel()
    points = np.asarray(points, dtype=float)
    u = (points.reshape(-1, 1) - data) / bandwidth
    vals = np.exp(-0.5 * u * u).sum(axis=1) / (data.size * bandwidth * _SQRT_2PI)
    return vals.reshape(points.shape)


def kde_fit(sample: ScaledSample, grid: Grid, bandwidth: float | None = None) -> DensityFunction:
    """Gaussian KDE on the grid, floored at ``PDF_FLOOR`` and renormalized on [0, 1]."""
    y = np.asarray(sample.y, dtype=float)
    if y.size < 2:
        raise ValueError("need at least two observations")
    h = silverman_bandwidth(y) if bandwidth is None else float(bandwidth)
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    values = gaussian_kde(y, grid.points, h)
    return DensityFunction.from_pdf(np.maximum(values, PDF_FLOOR), grid)
