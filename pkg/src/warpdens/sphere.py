"""Warping functions and their coordinates on the tangent space of the unit sphere.

A warping ``gamma`` of [0, 1] is identified with its square-root slope
function ``q = sqrt(gamma')``, which has unit L2 norm. The sphere is
flattened at the constant function 1 with the exponential map and its
inverse, and tangent vectors are expressed in an orthonormal basis. The two
charts are

    coefficients_of(inverse_exp(srsf_of(gamma)))   gamma -> c
    gamma_of(c)                                    c -> gamma

and they are mutually inverse on the ball ``||sum c_j b_j|| < pi/4``.
"""

from dataclasses import dataclass

import numpy as np

from .basis import BasisSet
from .grid import (
    Grid,
    cumulative_trapezoid,
    forward_difference,
    inner,
    invert_cdf,
    l2_norm,
    trapezoid_integral,
)

BALL_RADIUS = np.pi / 4
_SMALL = 1e-12


@dataclass(frozen=True)
class WarpingFunction:
    """Grid samples of a boundary-preserving diffeomorphism and its derivative."""

    gamma: np.ndarray
    gamma_dot: np.ndarray
    grid: Grid

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        gd = np.asarray(self.gamma_dot, dtype=float)
        if g.shape != (self.grid.T,) or gd.shape != (self.grid.T,):
            raise ValueError("warping samples must match the grid")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "gamma_dot", gd)

    @classmethod
    def identity(cls, grid: Grid) -> "WarpingFunction":
        return cls(grid.points.copy(), np.ones(grid.T), grid)

    @classmethod
    def from_gamma(cls, gamma, grid: Grid) -> "WarpingFunction":
        """Build from samples of gamma alone, differentiating by forward differences."""
        gamma = np.asarray(gamma, dtype=float)
        return cls(gamma, forward_difference(gamma, grid), grid)

    def validate(self, tol: float = 1e-8) -> None:
        g, gd = self.gamma, self.gamma_dot
        if abs(g[0]) > tol or abs(g[-1] - 1.0) > tol:
            raise ValueError("warping must fix 0 and 1")
        if np.any(np.diff(g) <= 0):
            raise ValueError("warping must be strictly increasing")
        if np.any(gd <= 0):
            raise ValueError("warping derivative must be strictly positive")
        if abs(trapezoid_integral(gd, self.grid) - 1.0) > tol:
            raise ValueError("warping derivative must integrate to 1")

    def __call__(self, x):
        return np.interp(x, self.grid.points, self.gamma)


def srsf_of(w: WarpingFunction) -> np.ndarray:
    """Square-root slope function ``sqrt(gamma_dot)``."""
    if np.any(w.gamma_dot <= 0):
        raise ValueError("SRSF needs a strictly positive derivative")
    return np.sqrt(w.gamma_dot)


def exp_map(v, grid: Grid) -> np.ndarray:
    """Sphere exponential map at the constant function 1.

    ``q = cos(|v|) + sin(|v|) / |v| * v``. Vectors shorter than 1e-12 map to 1.
    """
    v = np.asarray(v, dtype=float)
    theta = l2_norm(v, grid)
    if theta >= BALL_RADIUS:
        raise ValueError(f"tangent vector norm {theta:.6g} outside the pi/4 ball")
    if theta < _SMALL:
        return np.ones(grid.T)
    return np.cos(theta) + (np.sin(theta) / theta) * v


def inverse_exp(q, grid: Grid):
    """Inverse exponential map at 1; returns ``(v, theta)`` with ``theta = |v|``."""
    q = np.asarray(q, dtype=float)
    cos_theta = inner(q, np.ones(grid.T), grid)
    theta = float(np.arccos(np.clip(cos_theta, -1.0, 1.0)))
    if theta >= BALL_RADIUS:
        raise ValueError(f"SRSF at arc length {theta:.6g} is outside the pi/4 ball")
    if theta < _SMALL:
        return np.zeros(grid.T), 0.0
    return (theta / np.sin(theta)) * (q - cos_theta), theta


def coefficients_of(v, basis: BasisSet) -> np.ndarray:
    """Trapezoid projections of ``v`` onto each basis element."""
    v = np.asarray(v, dtype=float)
    w = np.full(basis.grid.T, basis.grid.step)
    w[[0, -1]] *= 0.5
    return basis.functions @ (w * v)


def tangent_norm(c, basis: BasisSet) -> float:
    return l2_norm(basis.synthesize(c), basis.grid)


def in_ball(c, basis: BasisSet, shrink: float = 0.0) -> bool:
    """Whether ``c`` lies in the open coefficient ball, optionally shrunk by a relative margin."""
    return tangent_norm(c, basis) < BALL_RADIUS * (1.0 - shrink)


def gamma_of(c, basis: BasisSet) -> WarpingFunction:
    """Warping with tangent coordinates ``c``: ``gamma(t) = int_0^t exp(v)^2``."""
    grid = basis.grid
    q = exp_map(basis.synthesize(c), grid)
    gamma_dot = q * q
    gamma = cumulative_trapezoid(gamma_dot, grid)
    gamma /= gamma[-1]
    gamma[-1] = 1.0
    return WarpingFunction(gamma, gamma_dot, grid)


def warping_coefficients(w: WarpingFunction, basis: BasisSet) -> np.ndarray:
    """The chart gamma -> c, the inverse of ``gamma_of`` on the ball."""
    v, _ = inverse_exp(srsf_of(w), w.grid)
    return coefficients_of(v, basis)


def transport_warping(f1, f2) -> WarpingFunction:
    """Warping ``F1^{-1} o F2`` carrying density ``f1`` onto ``f2``.

    ``f1`` and ``f2`` are ``DensityFunction`` objects on the same grid.
    """
    grid = f1.grid
    if np.any(f1.pdf <= 0) or np.any(f2.pdf <= 0):
        raise ValueError("transport needs strictly positive densities")
    gamma = invert_cdf(f1.cdf, grid, f2.cdf)
    gamma[0], gamma[-1] = 0.0, 1.0
    # inverse-function derivative; differencing the piecewise-linear quantile map is only first order
    gamma_dot = f2.pdf / np.interp(gamma, grid.points, f1.pdf)
    return WarpingFunction(gamma, gamma_dot, grid)


def check_derivative_bound(w: WarpingFunction, w_app: WarpingFunction):
    """Sup-norm gaps ``(|gamma - gamma_app|, |gamma' - gamma_app'|)``.

    For an approximation obtained by integrating an approximate derivative the
    first gap never exceeds the second.
    """
    return (
        float(np.max(np.abs(w.gamma - w_app.gamma))),
        float(np.max(np.abs(w.gamma_dot - w_app.gamma_dot))),
    )
