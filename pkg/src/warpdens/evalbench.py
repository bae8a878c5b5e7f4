"""Simulation scenarios, error norms and the Monte-Carlo harness.

Scenarios
---------
``mixexpnormal``
    0.75 Exp(rate 3) + 0.25 N(0.75, 2^2), truncated to [0, 1].
``claw``
    1/2 N(0, 1) + sum_{l=0}^{4} 1/10 N(l/2 - 1, 0.1^2).
``condlaplace``
    X ~ N(0, 1); Y | X = x is Laplace with mean 2x - 1 and variance 1.
``condbivariate``
    X1 ~ 0.95 N(0, 0.4^2) + 0.05 N(0, 1.4^2), X2 ~ U(0, 1);
    Y | X is (1 - e^{-x2}) N(x1 + 2, 0.5^2) + e^{-x2} Laplace(x1 - 1, 1).

For the Laplace components ``laplace_convention`` says whether the stated 1
is the variance (default) or the scale parameter.

Table units
-----------
Besides the integrated norms, ``ErrorReport`` carries the values in the
units used by the published simulation tables: for a ``T``-point evaluation
grid, ``100 * ||d||_p / T`` where ``d`` is the vector of pointwise errors.
On the customary 100-point grid this is the plain vector norm of ``d``.
"""

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats
from scipy.optimize import minimize_scalar

from .conditional import ConditionalConfig, estimate_conditional
from .density import gaussian_kde, turnbull_bounds
from .unconditional import EstimateConfig, estimate_density

log = logging.getLogger(__name__)

MIXEXPNORMAL = "mixexpnormal"
CLAW = "claw"
CONDLAPLACE = "condlaplace"
CONDBIVARIATE = "condbivariate"
SCENARIOS = (MIXEXPNORMAL, CLAW, CONDLAPLACE, CONDBIVARIATE)
CONDITIONAL = (CONDLAPLACE, CONDBIVARIATE)

EVAL_POINTS = 100
N_LOCATIONS = 10
NORMS = ("l1", "l2", "linf", "ise")


@dataclass(frozen=True)
class Scenario:
    name: str
    n: int
    seed: int = 0
    laplace_convention: str = "variance"

    def __post_init__(self):
        if self.name not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.name!r}; choose from {SCENARIOS}")
        if self.n < 5:
            raise ValueError("scenario needs n >= 5")
        if self.laplace_convention not in ("variance", "scale"):
            raise ValueError("laplace_convention is 'variance' or 'scale'")

    @property
    def conditional(self) -> bool:
        return self.name in CONDITIONAL

    @property
    def laplace_scale(self) -> float:
        return 1.0 / math.sqrt(2.0) if self.laplace_convention == "variance" else 1.0

    def with_seed(self, seed: int) -> "Scenario":
        return Scenario(self.name, self.n, seed, self.laplace_convention)


# --- true densities ----------------------------------------------------------

_MIX_W, _MIX_RATE, _MIX_MU, _MIX_SD = 0.75, 3.0, 0.75, 2.0
_MIX_Z = _MIX_W * (1.0 - math.exp(-_MIX_RATE)) + (1.0 - _MIX_W) * (
    stats.norm.cdf(1.0, _MIX_MU, _MIX_SD) - stats.norm.cdf(0.0, _MIX_MU, _MIX_SD)
)
_CLAW_MU = np.array([0.0] + [l / 2.0 - 1.0 for l in range(5)])
_CLAW_SD = np.array([1.0] + [0.1] * 5)
_CLAW_W = np.array([0.5] + [0.1] * 5)


def mixexpnormal_pdf(t):
    t = np.asarray(t, dtype=float)
    raw = _MIX_W * _MIX_RATE * np.exp(-_MIX_RATE * np.clip(t, 0.0, None)) + (1.0 - _MIX_W) * stats.norm.pdf(
        t, _MIX_MU, _MIX_SD
    )
    return np.where((t >= 0.0) & (t <= 1.0), raw / _MIX_Z, 0.0)


def claw_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.sum(_CLAW_W * stats.norm.pdf(x[..., None], _CLAW_MU, _CLAW_SD), axis=-1)


def laplace_pdf(y, loc, scale):
    return np.exp(-np.abs(np.asarray(y, dtype=float) - loc) / scale) / (2.0 * scale)


def true_pdf(s: Scenario, point, x0=None):
    """Analytic density of the scenario; conditional scenarios need the predictor ``x0``."""
    if s.name == MIXEXPNORMAL:
        return mixexpnormal_pdf(point)
    if s.name == CLAW:
        return claw_pdf(point)
    if x0 is None:
        raise ValueError(f"{s.name} is conditional; pass the predictor value x0")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if s.name == CONDLAPLACE:
        return laplace_pdf(point, 2.0 * x0[0] - 1.0, s.laplace_scale)
    p = 1.0 - math.exp(-x0[1])
    return p * stats.norm.pdf(point, x0[0] + 2.0, 0.5) + (1.0 - p) * laplace_pdf(
        point, x0[0] - 1.0, s.laplace_scale
    )


# --- sampling ----------------------------------------------------------------


def sample_scenario(s: Scenario):
    """Draw ``(y, X)`` for the scenario; ``X`` is None for unconditional ones."""
    rng = np.random.default_rng(s.seed)
    n = s.n
    if s.name == MIXEXPNORMAL:
        out = np.empty(0)
        while out.size < n:
            m = 2 * (n - out.size) + 16
            comp = rng.random(m) < _MIX_W
            draw = np.where(comp, rng.exponential(1.0 / _MIX_RATE, m), rng.normal(_MIX_MU, _MIX_SD, m))
            out = np.concatenate([out, draw[(draw >= 0.0) & (draw <= 1.0)]])
        return out[:n], None
    if s.name == CLAW:
        comp = rng.choice(_CLAW_W.size, size=n, p=_CLAW_W)
        return rng.normal(_CLAW_MU[comp], _CLAW_SD[comp]), None
    b = s.laplace_scale
    if s.name == CONDLAPLACE:
        x = rng.normal(0.0, 1.0, n)
        y = 2.0 * x - 1.0 + rng.laplace(0.0, b, n)
        return y, x[:, None]
    wide = rng.random(n) < 0.05
    x1 = rng.normal(0.0, np.where(wide, 1.4, 0.4))
    x2 = rng.random(n)
    normal_branch = rng.random(n) < 1.0 - np.exp(-x2)
    y = np.where(normal_branch, rng.normal(x1 + 2.0, 0.5), x1 - 1.0 + rng.laplace(0.0, b, n))
    return y, np.column_stack([x1, x2])


# --- error norms -------------------------------------------------------------


@dataclass
class ErrorReport:
    """Integrated norms of ``estimate - truth`` plus the same in table units."""

    l1: float
    l2: float
    linf: float
    ise: float
    l1_x100: float
    l2_x100: float
    linf_x100: float
    ise_grid: float
    scaled_by_100: bool = True

    def table(self) -> dict:
        return {"l1": self.l1_x100, "l2": self.l2_x100, "linf": self.linf_x100, "ise": self.ise_grid}


def error_norms(estimate, truth, eval_grid) -> ErrorReport:
    """Compare two evaluators on ``eval_grid``.

    Integrals use the trapezoid rule over the grid. ``ise_grid`` is the sum of
    squared pointwise errors, the squared table-unit L2 on a 100-point grid.
    """
    g = np.asarray(eval_grid, dtype=float)
    d = np.asarray(estimate(g), dtype=float) - np.asarray(truth(g), dtype=float)
    ad = np.abs(d)
    l2 = float(np.sqrt(np.trapezoid(d * d, g)))
    T = g.size
    return ErrorReport(
        l1=float(np.trapezoid(ad, g)),
        l2=l2,
        linf=float(ad.max()),
        ise=l2 * l2,
        l1_x100=float(100.0 * ad.sum() / T),
        l2_x100=float(100.0 * np.sqrt(np.sum(d * d)) / T),
        linf_x100=float(100.0 * ad.max() / T),
        ise_grid=float(np.sum(d * d)),
    )


def average_reports(reports) -> ErrorReport:
    """Norm-by-norm average, used across the query locations of a conditional fit."""
    fields = ErrorReport.__dataclass_fields__
    vals = {k: float(np.mean([getattr(r, k) for r in reports])) for k in fields if k != "scaled_by_100"}
    return ErrorReport(**vals)


# --- baseline ----------------------------------------------------------------


def ucv_bandwidth(x) -> float:
    """Gaussian-kernel bandwidth minimizing the unbiased (least-squares) cross-validation score."""
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    d2 = (x[:, None] - x[None, :]) ** 2
    off = ~np.eye(n, dtype=bool)
    d2_off = d2[off]

    def score(log_h):
        h = math.exp(log_h)
        conv = np.exp(-d2 / (4 * h * h)).sum() / (n * n * 2 * h * math.sqrt(math.pi))
        loo = np.exp(-d2_off / (2 * h * h)).sum() / (n * (n - 1) * h * math.sqrt(2 * math.pi))
        return conv - 2.0 * loo

    sd = np.std(x, ddof=1)
    res = minimize_scalar(score, bounds=(math.log(sd * 1e-3), math.log(sd * 2.0)), method="bounded")
    return float(math.exp(res.x))


# --- evaluation protocol -----------------------------------------------------


def evaluation_grid(s: Scenario, y) -> np.ndarray:
    """Response grid: [0, 1] for the truncated mixture, else the support bounds of ``y``."""
    if s.name == MIXEXPNORMAL:
        return np.linspace(0.0, 1.0, EVAL_POINTS)
    b = turnbull_bounds(y)
    return np.linspace(b.A, b.B, EVAL_POINTS)


def query_locations(X, n_locations: int = N_LOCATIONS) -> np.ndarray:
    """Equidistant points between the 5% and 95% sample quantiles of each predictor.

    For several predictors the coordinates advance together, giving points
    along the diagonal of the quantile box.
    """
    X = np.asarray(X, dtype=float)
    lo = np.quantile(X, 0.05, axis=0)
    hi = np.quantile(X, 0.95, axis=0)
    return lo + np.linspace(0.0, 1.0, n_locations)[:, None] * (hi - lo)


@dataclass(frozen=True)
class MethodConfig:
    """Which arms a Monte-Carlo run evaluates and how the warped arm is configured."""

    estimate: EstimateConfig | None = None
    conditional: ConditionalConfig = field(default_factory=ConditionalConfig)
    baseline: bool = True
    known_support: bool = True

    def estimate_config(self, s: Scenario) -> EstimateConfig:
        cfg = self.estimate or protocol_config(s.name)
        if s.name == MIXEXPNORMAL and self.known_support and cfg.support is None:
            cfg = EstimateConfig(**{**_cfg_kwargs(cfg), "support": (0.0, 1.0)})
        return cfg


def protocol_config(name: str) -> EstimateConfig:
    """Benchmark defaults: a fixed 15-element Legendre basis for the truncated
    mixture, the Fourier AIC search up to 40 elements otherwise."""
    if name == MIXEXPNORMAL:
        return EstimateConfig(J=15, basis_kind="legendre")
    return EstimateConfig(J_max=40)


def _cfg_kwargs(cfg: EstimateConfig) -> dict:
    return {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}


@dataclass
class ReplicateResult:
    index: int
    seed: int
    ok: bool
    warped: dict | None = None
    baseline: dict | None = None
    loglik: float = float("nan")
    initial_loglik: float = float("nan")
    loglik_ok: bool = True
    J: int | None = None
    seconds: float = 0.0
    error: str | None = None


def run_replicate(s: Scenario, method: MethodConfig, index: int = 0) -> ReplicateResult:
    """Simulate one dataset and score the warped estimate (and the KDE baseline) on it."""
    t0 = time.perf_counter()
    rec = ReplicateResult(index=index, seed=s.seed, ok=True)
    try:
        y, X = sample_scenario(s)
        grid = evaluation_grid(s, y)
        if s.conditional:
            locs = query_locations(X)
            fits = estimate_conditional(X, y, locs, method.conditional)
            failed = [f for f in fits if not f.ok]
            if failed:
                raise RuntimeError(f"{len(failed)} query locations failed: {failed[0].error}")
            reps = [error_norms(f, lambda g, x0=f.x0: true_pdf(s, g, x0), grid) for f in fits]
            rec.warped = asdict(average_reports(reps))
            rec.loglik = float(sum(f.fit.loglik for f in fits))
            rec.initial_loglik = float(sum(f.fit.initial_loglik for f in fits))
            rec.loglik_ok = all(f.fit.loglik >= f.fit.initial_loglik for f in fits)
            rec.J = fits[0].fit.J_used
        else:
            est = estimate_density(y, method.estimate_config(s))
            rec.warped = asdict(error_norms(est, lambda g: true_pdf(s, g), grid))
            rec.loglik = est.fit.loglik
            rec.initial_loglik = est.fit.initial_loglik
            rec.loglik_ok = est.fit.loglik >= est.fit.initial_loglik
            rec.J = est.fit.J_used
            if method.baseline:
                h = ucv_bandwidth(y)
                rec.baseline = asdict(error_norms(lambda g: gaussian_kde(y, g, h), lambda g: true_pdf(s, g), grid))
    except Exception as exc:  # a failed replicate is reported, never fatal
        log.warning("replicate %d (seed %d) failed: %s", index, s.seed, exc)
        rec.ok = False
        rec.error = f"{type(exc).__name__}: {exc}"
    rec.seconds = time.perf_counter() - t0
    return rec


@dataclass
class MonteCarloSummary:
    scenario: Scenario
    replicates: int
    mean: dict
    sd: dict
    baseline_mean: dict | None
    baseline_sd: dict | None
    seconds: float
    failures: list
    records: list = field(repr=False)

    @property
    def loglik_violations(self) -> int:
        return sum(1 for r in self.records if r.ok and not r.loglik_ok)

    def rows(self, table_units: bool = True):
        """``(arm, norm, mean, sd)`` tuples; table units by default."""
        keys = {"l1": "l1_x100", "l2": "l2_x100", "linf": "linf_x100", "ise": "ise_grid"}
        out = []
        for arm, m, sd in (("warped", self.mean, self.sd), ("kde_ucv", self.baseline_mean, self.baseline_sd)):
            if m is None:
                continue
            for norm in NORMS:
                k = keys[norm] if table_units else norm
                out.append((arm, norm, m[k], sd[k]))
        return out

    def to_csv(self, table_units: bool = True, timing: bool = False) -> str:
        """CSV with columns scenario,n,replicates,arm,norm,mean,sd,seconds.

        The ``seconds`` cells stay empty unless ``timing`` is set, so that
        reruns with the same seed give identical bytes.
        """
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scenario", "n", "replicates", "arm", "norm", "mean", "sd", "seconds"])
        for arm, norm, mean, sd in self.rows(table_units):
            w.writerow(
                [self.scenario.name, self.scenario.n, self.replicates, arm, norm, f"{mean:.10g}", f"{sd:.10g}",
                 f"{self.seconds:.3f}" if timing else ""]
            )
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "scenario": asdict(self.scenario),
            "replicates": self.replicates,
            "warped": {"mean": self.mean, "sd": self.sd},
            "baseline": None if self.baseline_mean is None else {"mean": self.baseline_mean, "sd": self.baseline_sd},
            "seconds": self.seconds,
            "failures": self.failures,
            "loglik_violations": self.loglik_violations,
        }


def replicate_seeds(master_seed: int, replicates: int) -> list[int]:
    """Independent per-replicate seeds spawned from the master seed."""
    children = np.random.SeedSequence(master_seed).spawn(replicates)
    return [int(c.generate_state(1, dtype=np.uint32)[0]) for c in children]


def _aggregate(dicts):
    if not dicts:
        return None, None
    keys = dicts[0].keys()
    mean, sd = {}, {}
    for k in keys:
        if k == "scaled_by_100":
            continue
        vals = np.array([d[k] for d in dicts], dtype=float)
        mean[k] = float(vals.mean())
        sd[k] = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
    return mean, sd


def worker_count() -> int:
    env = os.environ.get("WARPDENS_THREADS")
    if env:
        return max(1, int(env))
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1)


def run_monte_carlo(s: Scenario, replicates: int, method: MethodConfig = MethodConfig(), workers=None):
    """Run ``replicates`` independent datasets derived from ``s.seed``.

    Results are aggregated in replicate order, so the summary does not depend
    on how the work was scheduled.
    """
    if replicates < 1:
        raise ValueError("need at least one replicate")
    t0 = time.perf_counter()
    jobs = [(s.with_seed(seed), method, i) for i, seed in enumerate(replicate_seeds(s.seed, replicates))]
    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run_replicate, *zip(*jobs)))
    else:
        records = [run_replicate(*job) for job in jobs]
    good = [r for r in records if r.ok]
    mean, sd = _aggregate([r.warped for r in good])
    bmean, bsd = _aggregate([r.baseline for r in good if r.baseline is not None])
    return MonteCarloSummary(
        scenario=s,
        replicates=replicates,
        mean=mean,
        sd=sd,
        baseline_mean=bmean,
        baseline_sd=bsd,
        seconds=time.perf_counter() - t0,
        failures=[{"index": r.index, "seed": r.seed, "error": r.error} for r in records if not r.ok],
        records=records,
    )


def summary_json(summary: MonteCarloSummary) -> str:
    return json.dumps(summary.to_json(), indent=2, sort_keys=True)
