"""Conditional density estimation ``f(y | x0)`` by locally weighted warping.

The initial conditional density at ``x0`` is a normal centred at a local
linear estimate of the mean with the residual standard deviation as scale,
truncated to the support of ``y``. It is warped by maximizing a likelihood in
which each observation is weighted by a Gaussian kernel of its predictor
distance to ``x0``; only the nearest half of the sample gets positive weight.
The kernel width adapts to the local predictor density.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import FOURIER, make_basis
from .density import (
    DensityFunction,
    SupportBounds,
    gaussian_kde,
    normal_density_on_grid,
    scale_sample,
    silverman_bandwidth,
    turnbull_bounds,
    warp,
)
from .grid import DEFAULT_T, Grid
from .optimize import FitResult, Objective, SimplexOptions, fit_fixed_J
from .sphere import gamma_of

log = logging.getLogger(__name__)

K_FLOOR = 1e-8


def _as_design(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError("predictors must be a vector or an n-by-d array")
    return x


@dataclass
class RegressionFit:
    """Local linear mean fit; ``m_hat`` evaluates the mean at query points."""

    x: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    bandwidths: np.ndarray
    sigma_hat: float
    degenerate: bool = False

    def m_hat(self, points) -> np.ndarray:
        pts = _as_design(points)
        if pts.shape[1] != self.x.shape[1]:
            raise ValueError("query dimension does not match the predictors")
        return _local_linear(self.x, self.y, pts, self.bandwidths)


class SingularDesign(ValueError):
    pass


def _local_linear(x, y, pts, bandwidths, max_widen: int = 5):
    n, d = x.shape
    out = np.empty(pts.shape[0])
    for k, p in enumerate(pts):
        h = np.asarray(bandwidths, dtype=float).copy()
        for attempt in range(max_widen + 1):
            diff = x - p
            logw = -0.5 * np.sum((diff / h) ** 2, axis=1)
            w = np.exp(logw - logw.max())
            design = np.hstack([np.ones((n, 1)), diff])
            gram = design.T @ (design * w[:, None])
            n_eff = w.sum() ** 2 / np.sum(w * w)
            if n_eff >= d + 1 and np.linalg.cond(gram) < 1e12:
                beta = np.linalg.solve(gram, design.T @ (w * y))
                out[k] = beta[0]
                break
            h *= 2.0
        else:
            raise SingularDesign(f"local design singular at {p} after {max_widen} widenings")
    return out


def local_linear_fit(x, y, bandwidths=None) -> RegressionFit:
    """Gaussian-kernel local linear regression of ``y`` on ``x``.

    Bandwidths default to the Silverman rule on each predictor coordinate.
    The residual standard deviation at the sample points is ``sigma_hat``; a
    zero value marks the fit as degenerate.
    """
    x = _as_design(x)
    y = np.asarray(y, dtype=float).ravel()
    n, d = x.shape
    if y.size != n:
        raise ValueError("x and y must have the same number of rows")
    if n <= d + 1:
        raise ValueError(f"need more than {d + 1} observations")
    if bandwidths is None:
        bandwidths = np.array([silverman_bandwidth(x[:, j]) for j in range(d)])
    bandwidths = np.broadcast_to(np.asarray(bandwidths, dtype=float), (d,)).copy()
    if np.any(bandwidths <= 0):
        raise ValueError("bandwidths must be positive")
    resid = y - _local_linear(x, y, x, bandwidths)
    sigma = float(np.std(resid, ddof=1))
    degenerate = not sigma > 1e-12 * max(1.0, float(np.abs(y).max()))
    return RegressionFit(x, y, bandwidths, 0.0 if degenerate else sigma, degenerate)


@dataclass
class BandwidthPlan:
    """Global kernel width plus per-coordinate predictor KDEs for local stretching."""

    h_global: float
    predictors: np.ndarray = field(repr=False)
    kde_bandwidths: np.ndarray

    @property
    def d(self) -> int:
        return self.predictors.shape[1]

    def predictor_density(self, x0) -> np.ndarray:
        """Per-coordinate KDE values at ``x0``, floored at ``K_FLOOR``."""
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        vals = [
            gaussian_kde(self.predictors[:, j], x0[j], self.kde_bandwidths[j])
            for j in range(self.d)
        ]
        return np.maximum(np.array(vals, dtype=float), K_FLOOR)


def harmonic_mean(values) -> float:
    values = np.asarray(values, dtype=float)
    return float(values.size / np.sum(1.0 / values))


def make_bandwidth_plan(x, kde_bandwidths=None) -> BandwidthPlan:
    """Silverman KDE per predictor coordinate; the global width is their harmonic mean."""
    x = _as_design(x)
    d = x.shape[1]
    if kde_bandwidths is None:
        kde_bandwidths = [silverman_bandwidth(x[:, j]) for j in range(d)]
    hs = np.broadcast_to(np.asarray(kde_bandwidths, dtype=float), (d,)).copy()
    if np.any(hs <= 0):
        raise ValueError("bandwidths must be positive")
    return BandwidthPlan(harmonic_mean(hs), x, hs)


def bandwidth_at(plan: BandwidthPlan, x0) -> float:
    """``h / prod_i sqrt(K_i(x0_i))``."""
    return float(plan.h_global / np.prod(np.sqrt(plan.predictor_density(x0))))


@dataclass
class WeightVector:
    w: np.ndarray
    active: np.ndarray


def localized_weights(x, x0, h_x0: float, fraction: float = 0.5) -> WeightVector:
    """Standard-normal kernel weights of ``|x_i - x0| / h_x0`` on the nearest ``fraction`` of points.

    Ties in distance are broken by observation order.
    """
    if not h_x0 > 0:
        raise ValueError("kernel width must be positive")
    x = _as_design(x)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    dist = np.sqrt(np.sum((x - x0) ** 2, axis=1))
    k = math.ceil(fraction * dist.size)
    active = np.sort(np.argsort(dist, kind="stable")[:k])
    logk = -0.5 * (dist[active] / h_x0) ** 2
    kern = np.exp(logk - logk.max())
    w = np.zeros(dist.size)
    w[active] = kern / kern.sum()
    return WeightVector(w, active)


@dataclass(frozen=True)
class ConditionalConfig:
    """Settings for ``estimate_conditional``.

    ``weighting="uniform"`` gives every observation weight ``1/n``, which
    reduces each location to an unconditional fit of the same initial density.
    """

    J: int = 6
    basis_kind: str = FOURIER
    grid_T: int = DEFAULT_T
    regression_bandwidths: tuple[float, ...] | None = None
    kde_bandwidths: tuple[float, ...] | None = None
    active_fraction: float = 0.5
    weighting: str = "local"
    initial_model: str = "observation"
    options: SimplexOptions = field(default_factory=SimplexOptions)


@dataclass
class ConditionalFit:
    x0: np.ndarray
    bounds: SupportBounds
    initial: DensityFunction | None = None
    weights: WeightVector | None = field(default=None, repr=False)
    fit: FitResult | None = None
    density: DensityFunction | None = None
    ok: bool = True
    error: str | None = None

    def __call__(self, y):
        """Conditional density at response values ``y`` on the original scale."""
        if not self.ok:
            raise RuntimeError(f"fit at {self.x0} failed: {self.error}")
        y = np.asarray(y, dtype=float)
        return self.density((y - self.bounds.A) / self.bounds.width) / self.bounds.width


def _observation_initials(means, w, bounds, sd_scaled, grid):
    """Initial density rows ``N(m_hat(x_i), sigma_hat^2)`` on the scaled grid; zero-weight rows are dummies."""
    rows = np.ones((means.size, grid.T))
    for i in np.flatnonzero(w > 0):
        rows[i] = normal_density_on_grid((means[i] - bounds.A) / bounds.width, sd_scaled, grid).pdf
    return rows


def estimate_conditional(x, y, x0_list, cfg: ConditionalConfig = ConditionalConfig()) -> list[ConditionalFit]:
    """Warped conditional density estimates at each query point.

    Failures at one location are recorded on that location's result and do
    not stop the others.
    """
    x = _as_design(x)
    y = np.asarray(y, dtype=float).ravel()
    n, d = x.shape
    if n < 20:
        raise ValueError("need at least 20 observations")
    queries = _as_design(np.asarray(x0_list, dtype=float).reshape(-1, d))

    bounds = turnbull_bounds(y)
    ys = scale_sample(y, bounds).y
    grid = Grid(cfg.grid_T)
    basis = make_basis(cfg.basis_kind, cfg.J, grid)
    reg = local_linear_fit(x, y, cfg.regression_bandwidths)
    if reg.degenerate:
        raise ValueError("residual standard deviation is zero")
    plan = make_bandwidth_plan(x, cfg.kde_bandwidths)
    sd_scaled = reg.sigma_hat / bounds.width
    fitted_means = reg.m_hat(x) if cfg.initial_model == "observation" else None

    results = []
    for x0 in queries:
        res = ConditionalFit(x0=x0, bounds=bounds)
        try:
            mean = float(reg.m_hat(x0[None, :])[0])
            res.initial = normal_density_on_grid((mean - bounds.A) / bounds.width, sd_scaled, grid)
            if cfg.weighting == "uniform":
                res.weights = WeightVector(np.full(n, 1.0 / n), np.arange(n))
            else:
                h0 = bandwidth_at(plan, x0)
                res.weights = localized_weights(x, x0, h0, cfg.active_fraction)
            rows = None
            if cfg.initial_model == "observation":
                rows = _observation_initials(fitted_means, res.weights.w, bounds, sd_scaled, grid)
            obj = Objective(res.initial, ys, basis, res.weights.w, rows)
            res.fit = fit_fixed_J(obj, None, cfg.options)
            res.density = warp(res.initial, gamma_of(res.fit.c_hat, basis))
        except (ValueError, np.linalg.LinAlgError) as exc:
            log.warning("conditional fit at %s failed: %s", x0, exc)
            res.ok = False
            res.error = str(exc)
        results.append(res)
    return results
