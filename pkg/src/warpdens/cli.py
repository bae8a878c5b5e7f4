"""Command-line interface: ``warpdens {estimate,conditional,simulate,bench}``.

Exit codes: 0 success, 1 pipeline or I/O failure, 2 usage error.
"""

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .conditional import ConditionalConfig, estimate_conditional
from .evalbench import (
    CONDITIONAL,
    SCENARIOS,
    MethodConfig,
    Scenario,
    protocol_config,
    run_monte_carlo,
    sample_scenario,
    summary_json,
)
from .optimize import SimplexOptions
from .schema import validate_conditional, validate_estimate
from .unconditional import KDE, TRUNCATED_NORMAL, EstimateConfig, estimate_density

log = logging.getLogger("warpdens")

DEFAULT_SEED = 20170101
COMMANDS = ("estimate", "conditional", "simulate", "bench")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    output_path: str | None = None
    input_path: str | None = None
    seed: int = DEFAULT_SEED
    grid_T: int = 100
    initial_kind: str = KDE
    basis_kind: str = "fourier"
    J: int | None = None
    J_max: int = 40
    multires: bool = True
    support: tuple[float, float] | None = None
    restarts: int | None = None
    at: list = field(default_factory=list)
    initial_model: str = "observation"
    scenario: str | None = None
    n: int | None = None
    replicates: int = 20
    baseline: bool = True
    json_path: str | None = None
    timing: bool = False
    workers: int | None = None

    def estimate_config(self) -> EstimateConfig:
        return EstimateConfig(
            initial_kind=self.initial_kind,
            basis_kind=self.basis_kind,
            J=self.J,
            J_max=self.J_max,
            multires=self.multires,
            grid_T=self.grid_T,
            seed=self.seed,
            support=self.support,
            options=None if self.restarts is None else SimplexOptions(restarts=self.restarts),
        )

    def conditional_config(self) -> ConditionalConfig:
        return ConditionalConfig(
            J=6 if self.J is None else self.J,
            basis_kind=self.basis_kind,
            grid_T=self.grid_T,
            initial_model=self.initial_model,
            options=SimplexOptions(restarts=3 if self.restarts is None else self.restarts),
        )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _pair(text):
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A,B but got {text!r}")
    return a, b


def _point(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="warpdens", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fit_options(sp):
        sp.add_argument("--T", dest="grid_T", type=int, default=100, help="grid size on [0, 1]")
        sp.add_argument("--basis", dest="basis_kind", choices=("fourier", "legendre"))
        sp.add_argument("--J", type=int, help="fixed number of basis elements")
        sp.add_argument("--restarts", type=int, help="simplex restarts per fit (default 3, or 0 for the AIC search)")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)

    def unconditional_options(sp):
        sp.add_argument("--initial", dest="initial_kind", choices=(KDE, TRUNCATED_NORMAL))
        sp.add_argument("--J-max", dest="J_max", type=int)
        sp.add_argument("--multires", action="store_true", default=None, help="AIC search over basis sizes")
        sp.add_argument("--support", type=_pair, help="known support A,B instead of estimated bounds")

    sp = sub.add_parser("estimate", help="estimate a univariate density from a CSV column")
    sp.add_argument("--input", dest="input_path", required=True)
    sp.add_argument("--out", dest="output_path", required=True)
    fit_options(sp)
    unconditional_options(sp)

    sp = sub.add_parser("conditional", help="conditional densities of y at query predictor values")
    sp.add_argument("--input", dest="input_path", required=True)
    sp.add_argument("--out", dest="output_path", required=True)
    sp.add_argument("--at", type=_point, action="append", required=True, help="query point, e.g. 0.5,0.5")
    sp.add_argument("--initial-model", choices=("observation", "location"), default="observation")
    fit_options(sp)

    sp = sub.add_parser("simulate", help="write a simulated dataset as CSV")
    sp.add_argument("--scenario", choices=SCENARIOS, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--out", dest="output_path", required=True)

    sp = sub.add_parser("bench", help="Monte-Carlo error study of a scenario")
    sp.add_argument("--scenario", choices=SCENARIOS, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--replicates", type=int, default=20)
    sp.add_argument("--out", dest="output_path", help="CSV summary (default: stdout)")
    sp.add_argument("--json", dest="json_path", help="also write a JSON summary")
    sp.add_argument("--no-baseline", dest="baseline", action="store_false")
    sp.add_argument("--timing", action="store_true", help="fill the seconds column")
    sp.add_argument("--workers", type=int)
    sp.add_argument("--initial-model", choices=("observation", "location"), default="observation")
    fit_options(sp)
    unconditional_options(sp)
    for sp in sub.choices.values():
        # SUPPRESS keeps a -v given before the subcommand
        sp.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    return p


def parse_args(argv=None) -> RunConfig:
    """Parse and validate a command line; raises ``UsageError`` on bad input."""
    ns = build_parser().parse_args(argv)
    if ns.verbose:
        logging.getLogger("warpdens").setLevel(logging.INFO)
    kw = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__ and v is not None}
    multires_flag = getattr(ns, "multires", None)
    if ns.command == "bench":
        # unset fit options follow the scenario's benchmark protocol
        base = protocol_config(ns.scenario)
        for k in ("basis_kind", "J_max", "initial_kind"):
            kw.setdefault(k, getattr(base, k))
        if ns.J is None and not multires_flag and base.J is not None:
            kw["J"] = base.J
    cfg = RunConfig(**kw)
    if cfg.command in ("estimate", "bench"):
        if cfg.J is not None and multires_flag:
            raise UsageError("--J fixes the basis size and cannot be combined with --multires")
        cfg.multires = cfg.J is None
        if cfg.J is not None and not 1 <= cfg.J <= cfg.J_max:
            raise UsageError(f"--J must lie in [1, {cfg.J_max}]")
    if cfg.n is not None and cfg.n < 5:
        raise UsageError("--n must be at least 5")
    if cfg.restarts is None:
        search = cfg.command in ("estimate", "bench") and cfg.multires and cfg.scenario not in CONDITIONAL
        cfg.restarts = 0 if search else 3
    if cfg.restarts < 0:
        raise UsageError("--restarts must be nonnegative")
    if cfg.replicates < 1:
        raise UsageError("--replicates must be at least 1")
    if cfg.grid_T < 3:
        raise UsageError("--T must be at least 3")
    return cfg


# --- I/O -----------------------------------------------------------------------


def read_table(path):
    """Read a numeric CSV; returns ``(y, X)`` with ``X`` None when there are no predictors.

    The column named ``y`` is the response and the others are predictors.
    A headerless single column is also accepted.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: no data")
    header = rows[0]
    try:
        [float(c) for c in header]
        has_header = False
    except ValueError:
        has_header = True
    body = rows[1:] if has_header else rows
    try:
        data = np.array([[float(c) for c in r] for r in body], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: non-numeric cell ({exc})") from None
    if data.ndim != 2 or data.shape[0] == 0:
        raise ValueError(f"{path}: no data rows")
    names = [h.strip() for h in header] if has_header else [f"c{i}" for i in range(data.shape[1])]
    if len(names) != data.shape[1]:
        raise ValueError(f"{path}: header has {len(names)} columns but rows have {data.shape[1]}")
    if "y" in names:
        j = names.index("y")
    elif data.shape[1] == 1:
        j = 0
    else:
        raise ValueError(f"{path}: no column named y")
    X = np.delete(data, j, axis=1)
    return data[:, j], (X if X.shape[1] else None)


def write_table(path, y, X=None):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if X is None:
            w.writerow(["y"])
            w.writerows([[repr(float(v))] for v in y])
        else:
            w.writerow(["y"] + [f"x{j + 1}" for j in range(X.shape[1])])
            w.writerows([[repr(float(v))] + [repr(float(u)) for u in row] for v, row in zip(y, X)])


def _fit_block(fit):
    return {
        "J": int(fit.J_used),
        "loglik": float(fit.loglik),
        "initial_loglik": float(fit.initial_loglik),
        "aic": float(fit.aic),
        "coefficients": [float(c) for c in fit.c_hat],
        "converged": bool(fit.converged),
    }


def estimate_document(est, cfg: RunConfig) -> dict:
    x, pdf = est.on_original_scale()
    return {
        "grid": x.tolist(),
        "pdf": pdf.tolist(),
        "bounds": {"A": est.bounds.A, "B": est.bounds.B},
        "fit": _fit_block(est.fit),
        "meta": {"seed": cfg.seed, "config": est_config_dict(cfg)},
    }


def est_config_dict(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d["support"] = list(cfg.support) if cfg.support is not None else None
    return d


def conditional_document(fits, cfg: RunConfig) -> dict:
    blocks = []
    for f in fits:
        b = {"x0": [float(v) for v in f.x0], "ok": f.ok, "bounds": {"A": f.bounds.A, "B": f.bounds.B}}
        if f.ok:
            grid = f.bounds.A + f.bounds.width * f.density.grid.points
            b.update(grid=grid.tolist(), pdf=(f.density.pdf / f.bounds.width).tolist(), fit=_fit_block(f.fit))
        else:
            b["error"] = f.error
        blocks.append(b)
    return {"locations": blocks, "meta": {"seed": cfg.seed, "config": est_config_dict(cfg)}}


def _dump(doc, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


# --- commands --------------------------------------------------------------------


def _estimate(cfg: RunConfig):
    y, _ = read_table(cfg.input_path)
    est = estimate_density(y, cfg.estimate_config())
    log.info("selected J=%d loglik %.4f (initial %.4f), trace %s", est.fit.J_used, est.fit.loglik,
             est.fit.initial_loglik, [(J, round(ll, 3)) for J, ll, _ in est.fit.trace])
    doc = estimate_document(est, cfg)
    validate_estimate(doc)
    _dump(doc, cfg.output_path)
    return 0


def _conditional(cfg: RunConfig):
    y, X = read_table(cfg.input_path)
    if X is None:
        raise ValueError(f"{cfg.input_path}: conditional estimation needs predictor columns")
    for pt in cfg.at:
        if len(pt) != X.shape[1]:
            raise UsageError(f"--at {pt} has {len(pt)} coordinates but the data has {X.shape[1]} predictors")
    fits = estimate_conditional(X, y, np.array(cfg.at), cfg.conditional_config())
    for f in fits:
        if f.ok:
            log.info("x0=%s loglik %.4f (initial %.4f)", f.x0.tolist(), f.fit.loglik, f.fit.initial_loglik)
    doc = conditional_document(fits, cfg)
    validate_conditional(doc)
    _dump(doc, cfg.output_path)
    return 0 if all(f.ok for f in fits) else 1


def _simulate(cfg: RunConfig):
    y, X = sample_scenario(Scenario(cfg.scenario, cfg.n, cfg.seed))
    write_table(cfg.output_path, y, X)
    return 0


def _bench(cfg: RunConfig):
    scenario = Scenario(cfg.scenario, cfg.n, cfg.seed)
    method = MethodConfig(
        estimate=cfg.estimate_config(), conditional=cfg.conditional_config(), baseline=cfg.baseline
    )
    summary = run_monte_carlo(scenario, cfg.replicates, method, cfg.workers)
    text = summary.to_csv(timing=cfg.timing)
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.json_path:
        doc = json.loads(summary_json(summary))
        if not cfg.timing:
            doc.pop("seconds")
        _dump(doc, cfg.json_path)
    for f in summary.failures:
        log.warning("replicate %d failed: %s", f["index"], f["error"])
    return 0 if not summary.failures else 1


_RUNNERS = {"estimate": _estimate, "conditional": _conditional, "simulate": _simulate, "bench": _bench}


def run(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    try:
        code = _RUNNERS[cfg.command](cfg)
    except UsageError as exc:
        print(f"warpdens: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"warpdens: I/O error on {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as exc:
        print(f"warpdens: {cfg.command} failed: {exc}", file=sys.stderr)
        return 1
    log.info("%s finished in %.2f s", cfg.command, time.perf_counter() - t0)
    return code


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        msg = str(exc)
        print(msg if msg.startswith("warpdens") else f"warpdens: error: {msg}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
