"""Likelihood maximization over tangent coefficients.

The objective is the (optionally weighted) log-likelihood of the warped
density ``f_p(gamma_c(x)) * gamma_c'(x)`` at the data. It is maximized with
a Nelder-Mead simplex search; points outside the coefficient ball score
``-inf``. ``fit_multiresolution`` grows the basis a few elements at a time,
warm-starting each stage from the previous optimum, and keeps the size with
the smallest AIC.
"""

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .basis import BasisSet
from .density import DensityFunction
from .sphere import BALL_RADIUS

FEASIBLE_SHRINK = 1e-6


@dataclass(frozen=True)
class SimplexOptions:
    """Nelder-Mead stopping rules; ``max_evals_per_dim * dim`` caps evaluations."""

    max_evals_per_dim: int = 200
    xatol: float = 1e-6
    fatol: float = 1e-8
    restarts: int = 3


class Objective:
    """Log-likelihood of warped versions of ``initial`` at data in (0, 1).

    ``observation_initials`` optionally gives each observation its own initial
    density (one grid row per observation); the same warping is applied to all
    of them. Conditional fits use this with the initial density at each
    observation's own predictor value.

    Interpolation weights for the data are computed once, so each evaluation
    costs one synthesis, one cumulative sum and two gathers.
    """

    def __init__(self, initial: DensityFunction, data, basis: BasisSet, weights=None, observation_initials=None):
        data = np.asarray(data, dtype=float).ravel()
        if np.any(data <= 0.0) or np.any(data >= 1.0):
            raise ValueError("data must lie strictly inside (0, 1)")
        if initial.grid != basis.grid:
            raise ValueError("initial density and basis must share a grid")
        if weights is not None:
            weights = np.asarray(weights, dtype=float).ravel()
            if weights.shape != data.shape:
                raise ValueError("weights and data must have the same length")
            if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-10:
                raise ValueError("weights must be nonnegative and sum to 1")
        self.initial = initial
        self.data = data
        self.weights = weights
        self.basis = basis
        self.n = data.size

        grid = basis.grid
        keep = slice(None) if weights is None else weights > 0
        x = data[keep]
        self._w = None if weights is None else weights[keep]
        idx = np.minimum((x / grid.step).astype(int), grid.T - 2)
        self._idx = idx
        self._idx1 = idx + 1
        self._frac = x / grid.step - idx
        self._cofrac = 1.0 - self._frac
        tw = np.full(grid.T, grid.step)
        tw[[0, -1]] *= 0.5
        self._trap_w = tw
        self._half_step = 0.5 * grid.step
        self._pts = initial.grid.points
        self._fp = initial.pdf
        self._rows = None
        if observation_initials is not None:
            P = np.asarray(observation_initials, dtype=float)
            if P.shape != (data.size, grid.T):
                raise ValueError("need one initial density row per observation")
            if np.any(P <= 0):
                raise ValueError("initial densities must be strictly positive")
            self._rows = P[keep]
            self._row_idx = np.arange(self._rows.shape[0])
            self._inv_step = 1.0 / grid.step

    @property
    def J(self) -> int:
        return self.basis.J

    def _at_data(self, values):
        return values[self._idx] * self._cofrac + values[self._idx1] * self._frac

    def _warped_at_data(self, c, radius=BALL_RADIUS):
        v = np.asarray(c, dtype=float) @ self.basis.functions
        theta = np.sqrt(max(float(self._trap_w @ (v * v)), 0.0))
        if theta >= radius:
            if radius < BALL_RADIUS:
                return None
            raise ValueError(f"coefficients outside the pi/4 ball (norm {theta:.6g})")
        if theta < 1e-12:
            gamma_dot = np.ones_like(v)
        else:
            q = np.cos(theta) + (np.sin(theta) / theta) * v
            gamma_dot = q * q
        gamma = np.empty_like(gamma_dot)
        gamma[0] = 0.0
        np.cumsum(self._half_step * (gamma_dot[1:] + gamma_dot[:-1]), out=gamma[1:])
        gamma /= gamma[-1]
        g_x = self._at_data(gamma)
        if self._rows is None:
            f_at = np.interp(g_x, self._pts, self._fp)
        else:
            u = g_x * self._inv_step
            k = np.minimum(u.astype(int), self._pts.size - 2)
            fr = u - k
            f_at = self._rows[self._row_idx, k] * (1.0 - fr) + self._rows[self._row_idx, k + 1] * fr
        return f_at * self._at_data(gamma_dot)

    def pointwise(self, c) -> np.ndarray:
        """Per-observation log density of the warped estimate (``-inf`` where it vanishes)."""
        dens = self._warped_at_data(c)
        with np.errstate(divide="ignore"):
            return np.log(np.maximum(dens, 0.0))

    def __call__(self, c) -> float:
        """Total (or weight-averaged) log-likelihood at coefficients ``c``."""
        return self._total(self._warped_at_data(c))

    def _total(self, dens) -> float:
        if dens is None or not dens.min() > 0:
            return -np.inf
        ell = np.log(dens)
        if self._w is None:
            return float(ell.sum())
        return float(self._w @ ell)

    def feasible_value(self, c) -> float:
        """Objective with ``-inf`` for points outside the slightly shrunk ball."""
        return self._total(self._warped_at_data(c, BALL_RADIUS * (1.0 - FEASIBLE_SHRINK)))

    def aic(self, loglik: float) -> float:
        """``2 J - 2 loglik``; a weighted fit counts ``n`` times its weighted mean."""
        eff = loglik if self.weights is None else self.n * loglik
        return 2.0 * self.J - 2.0 * eff


def log_likelihood(obj: Objective, c) -> float:
    return obj(c)


@dataclass
class FitResult:
    c_hat: np.ndarray
    loglik: float
    aic: float
    J_used: int
    iterations: int
    converged: bool
    basis: BasisSet = field(repr=False)
    initial_loglik: float = float("nan")
    trace: list = field(default_factory=list, repr=False)


@dataclass(frozen=True)
class SimplexResult:
    x: np.ndarray
    value: float
    evaluations: int
    converged: bool


def nelder_mead(f: Callable, x0, options: SimplexOptions = SimplexOptions()) -> SimplexResult:
    """Maximize ``f`` by Nelder-Mead from ``x0``.

    Standard coefficients (reflection 1, expansion 2, contraction 0.5, shrink
    0.5). The starting simplex moves each coordinate by 5%, or by 0.00025 when
    it is zero.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    f0 = f(x0)
    if not np.isfinite(f0):
        raise ValueError("objective is not finite at the starting point")
    dim = x0.size
    cap = options.max_evals_per_dim * dim

    def neg(x):
        val = f(x)
        return np.inf if not np.isfinite(val) else -val

    x, value, evals, converged = x0, f0, 0, False
    # each restart rebuilds the simplex around the incumbent
    for _ in range(options.restarts + 1):
        res = minimize(
            neg,
            x,
            method="Nelder-Mead",
            options={
                "maxfev": cap,
                "maxiter": cap,
                "xatol": options.xatol,
                "fatol": options.fatol,
                "adaptive": False,
            },
        )
        evals += int(res.nfev)
        converged = res.status == 0
        new_value = -float(res.fun)
        if not new_value > value:
            break
        gain = new_value - value
        x, value = np.asarray(res.x, dtype=float), new_value
        if gain <= options.fatol:
            break
    return SimplexResult(x, value, evals, bool(converged))


def fit_fixed_J(obj: Objective, c_init=None, options: SimplexOptions = SimplexOptions()) -> FitResult:
    """Maximize the likelihood over ``J = obj.J`` coefficients from ``c_init`` (default 0)."""
    c0 = np.zeros(obj.J) if c_init is None else np.asarray(c_init, dtype=float).copy()
    if c0.shape != (obj.J,):
        raise ValueError(f"expected {obj.J} starting coefficients")
    start = obj.feasible_value(c0)
    if not np.isfinite(start):
        raise ValueError("starting coefficients are infeasible")
    # the simplex works on the per-observation mean so tolerances do not scale with n
    scale = float(obj.n) if obj.weights is None else 1.0
    res = nelder_mead(lambda c: obj.feasible_value(c) / scale, c0, options)
    loglik = obj(res.x)
    return FitResult(
        c_hat=res.x,
        loglik=loglik,
        aic=obj.aic(loglik),
        J_used=obj.J,
        iterations=res.evaluations,
        converged=res.converged,
        basis=obj.basis,
        initial_loglik=obj(np.zeros(obj.J)),
        trace=[(obj.J, loglik, obj.aic(loglik))],
    )


def default_schedule(J_max: int, start: int = 2, step: int = 2) -> list[int]:
    sched = list(range(start, J_max + 1, step))
    if not sched or sched[-1] != J_max:
        sched.append(J_max)
    return sched


def fit_multiresolution(
    obj_factory: Callable[[int], Objective],
    J_schedule: Sequence[int] | None = None,
    J_max: int = 40,
    options: SimplexOptions = SimplexOptions(),
) -> FitResult:
    """Grow the basis along ``J_schedule``, keeping the fit with the best AIC.

    Each stage after the first is started twice, from zero and from the
    previous stage's optimum padded with zeros, and the better of the two is
    carried forward.
    """
    sched = default_schedule(J_max) if J_schedule is None else [J for J in J_schedule if J <= J_max]
    if not sched:
        raise ValueError("empty basis-size schedule")
    if any(b <= a for a, b in zip(sched, sched[1:])):
        raise ValueError("schedule must be strictly increasing")

    best = None
    prev = None
    trace = []
    evals = 0
    init_ll = None
    for J in sched:
        obj = obj_factory(J)
        if init_ll is None:
            init_ll = obj(np.zeros(J))
        fit = fit_fixed_J(obj, np.zeros(J), options)
        evals += fit.iterations
        if prev is not None:
            padded = np.zeros(J)
            padded[: prev.c_hat.size] = prev.c_hat
            warm = fit_fixed_J(obj, padded, options)
            evals += warm.iterations
            if warm.aic < fit.aic:
                fit = warm
        trace.append((J, fit.loglik, fit.aic))
        prev = fit
        if best is None or fit.aic < best.aic:
            best = fit
    best.iterations = evals
    best.initial_loglik = init_ll
    best.trace = trace
    return best
