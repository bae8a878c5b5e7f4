"""Univariate density estimation by warping an initial estimate."""

from dataclasses import asdict, dataclass, field

import numpy as np

from .basis import FOURIER, make_basis
from .density import (
    DensityFunction,
    SupportBounds,
    kde_fit,
    scale_sample,
    truncated_normal_fit,
    turnbull_bounds,
    unscale_density,
    warp,
)
from .grid import DEFAULT_T, Grid
from .optimize import FitResult, Objective, SimplexOptions, default_schedule, fit_fixed_J, fit_multiresolution
from .sphere import gamma_of

KDE = "kde"
TRUNCATED_NORMAL = "truncnorm"


@dataclass(frozen=True)
class EstimateConfig:
    """Pipeline settings.

    ``J`` fixes the basis size (and turns off the AIC search); otherwise the
    basis grows along ``schedule`` (default 2, 4, ..., ``J_max``). ``support``
    replaces the data-driven support bounds when the true support is known.
    ``options`` defaults to three simplex restarts for a fixed ``J`` and none
    for the AIC search, whose stages are already warm-started.
    """

    initial_kind: str = KDE
    basis_kind: str = FOURIER
    J: int | None = None
    J_max: int = 40
    multires: bool = True
    grid_T: int = DEFAULT_T
    seed: int = 0
    bandwidth: float | None = None
    support: tuple[float, float] | None = None
    schedule: tuple[int, ...] | None = None
    options: SimplexOptions | None = None

    def __post_init__(self):
        if self.J is not None:
            if self.multires:
                object.__setattr__(self, "multires", False)
            if not 1 <= self.J <= self.J_max:
                raise ValueError(f"J={self.J} must lie in [1, J_max={self.J_max}]")
        elif not self.multires:
            raise ValueError("a fixed J is required when the multiresolution search is off")
        if self.initial_kind not in (KDE, TRUNCATED_NORMAL):
            raise ValueError(f"unknown initial estimate {self.initial_kind!r}")
        if self.options is None:
            object.__setattr__(self, "options", SimplexOptions(restarts=0 if self.multires else 3))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["support"] = list(self.support) if self.support is not None else None
        d["schedule"] = list(self.schedule) if self.schedule is not None else None
        return d


@dataclass
class DensityEstimate:
    scaled: DensityFunction
    bounds: SupportBounds
    fit: FitResult
    initial: DensityFunction
    data: np.ndarray = field(repr=False)

    @property
    def grid(self) -> Grid:
        return self.scaled.grid

    def on_original_scale(self):
        """``(x_grid, pdf)`` on [A, B]."""
        return unscale_density(self.scaled, self.bounds)

    def __call__(self, x):
        return evaluate_estimate(self, x)


def initial_estimate(sample, grid: Grid, kind: str = KDE, bandwidth=None) -> DensityFunction:
    if kind == KDE:
        return kde_fit(sample, grid, bandwidth)
    if kind == TRUNCATED_NORMAL:
        return truncated_normal_fit(sample, grid)
    raise ValueError(f"unknown initial estimate {kind!r}")


def estimate_density(x, cfg: EstimateConfig = EstimateConfig()) -> DensityEstimate:
    """Scale to [0, 1], fit an initial density, optimize its warping, and warp it."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 5:
        raise ValueError("need at least five observations")
    if not np.all(np.isfinite(x)):
        raise ValueError("observations must be finite")
    bounds = SupportBounds(*cfg.support) if cfg.support is not None else turnbull_bounds(x)
    sample = scale_sample(x, bounds)
    grid = Grid(cfg.grid_T)
    f_p = initial_estimate(sample, grid, cfg.initial_kind, cfg.bandwidth)

    def objective(J):
        return Objective(f_p, sample.y, make_basis(cfg.basis_kind, J, grid))

    if cfg.multires:
        sched = cfg.schedule if cfg.schedule is not None else default_schedule(cfg.J_max)
        fit = fit_multiresolution(objective, sched, cfg.J_max, cfg.options)
    else:
        fit = fit_fixed_J(objective(cfg.J), None, cfg.options)
    warped = warp(f_p, gamma_of(fit.c_hat, fit.basis))
    return DensityEstimate(warped, bounds, fit, f_p, sample.y)


def evaluate_estimate(est: DensityEstimate, x) -> np.ndarray:
    """Density on the original scale at ``x``; zero outside [A, B]."""
    x = np.asarray(x, dtype=float)
    t = (x - est.bounds.A) / est.bounds.width
    return est.scaled(t) / est.bounds.width
