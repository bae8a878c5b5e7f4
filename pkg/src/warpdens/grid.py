"""Uniform grids on [0, 1] and the discrete calculus used throughout the package.

Every function in the package is represented by its samples on a ``Grid``.
Integrals use the composite trapezoid rule, derivatives use first-order
forward differences, and off-grid evaluation is piecewise linear.
"""

from dataclasses import dataclass, field

import numpy as np

DEFAULT_T = 100


@dataclass(frozen=True)
class Grid:
    """``T`` equidistant points spanning [0, 1], endpoints included."""

    T: int = DEFAULT_T
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 3:
            raise ValueError(f"grid needs at least 3 points, got T={self.T}")
        pts = np.linspace(0.0, 1.0, int(self.T))
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def step(self) -> float:
        return 1.0 / (self.T - 1)

    def __len__(self):
        return self.T


def _check(values, grid=None):
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise ValueError("grid function values must be one-dimensional")
    if grid is not None and values.shape[0] != grid.T:
        raise ValueError(f"expected {grid.T} values, got {values.shape[0]}")
    if not np.all(np.isfinite(values)):
        raise ValueError("grid function values must be finite")
    return values


def trapezoid_integral(values, grid: Grid) -> float:
    """Composite trapezoid rule for the integral of ``values`` over [0, 1]."""
    values = _check(values, grid)
    return float(grid.step * (values.sum() - 0.5 * (values[0] + values[-1])))


def cumulative_trapezoid(values, grid: Grid) -> np.ndarray:
    """Running trapezoid integral from 0; the first entry is 0."""
    values = _check(values, grid)
    out = np.empty_like(values)
    out[0] = 0.0
    np.cumsum(0.5 * grid.step * (values[1:] + values[:-1]), out=out[1:])
    return out


def inner(f, g, grid: Grid) -> float:
    """Trapezoid L2 inner product."""
    return trapezoid_integral(np.asarray(f) * np.asarray(g), grid)


def l2_norm(f, grid: Grid) -> float:
    return float(np.sqrt(max(inner(f, f, grid), 0.0)))


def forward_difference(values, grid: Grid) -> np.ndarray:
    """First-order forward differences; the last node repeats the previous slope."""
    values = _check(values, grid)
    out = np.empty_like(values)
    out[:-1] = np.diff(values) / grid.step
    out[-1] = out[-2]
    return out


def linear_interpolate(values, grid: Grid, x):
    """Piecewise-linear interpolation of grid samples at ``x`` in [0, 1].

    Accepts a scalar or an array of evaluation points and returns the same shape.
    """
    values = _check(values, grid)
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa < 0.0) or np.any(xa > 1.0):
        raise ValueError("interpolation points must lie in [0, 1]")
    out = np.interp(xa, grid.points, values)
    return float(out) if out.ndim == 0 else out


def invert_cdf(cdf, grid: Grid, u):
    """Quantile of a piecewise-linear CDF sampled on ``grid``.

    On flat stretches of ``cdf`` the left end of the stretch is returned.
    ``u`` may be a scalar or an array.
    """
    cdf = _check(cdf, grid)
    if np.any(np.diff(cdf) < 0):
        raise ValueError("CDF must be nondecreasing")
    if abs(cdf[0]) > 1e-12 or abs(cdf[-1] - 1.0) > 1e-12:
        raise ValueError("CDF must run from 0 to 1")
    ua = np.asarray(u, dtype=float)
    if np.any(ua < 0.0) or np.any(ua > 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    # first node whose CDF reaches u; the segment ending there contains the quantile
    j = np.searchsorted(cdf, ua, side="left")
    j = np.clip(j, 1, grid.T - 1)
    lo, hi = cdf[j - 1], cdf[j]
    rise = hi - lo
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(rise > 0, (ua - lo) / np.where(rise > 0, rise, 1.0), 0.0)
    x = grid.points[j - 1] + np.clip(frac, 0.0, 1.0) * grid.step
    x = np.where(ua <= cdf[0], 0.0, x)
    return float(x) if x.ndim == 0 else x
