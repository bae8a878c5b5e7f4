"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or directly with ``python3 tests/test_acceptance.py``.

Random warpings are drawn from the whole coefficient ball: a uniform
direction and a tangent norm uniform on (0, pi/4).
"""

import time

import numpy as np
import pytest

from warpdens.basis import make_fourier
from warpdens.density import DensityFunction, compose, warp
from warpdens.evalbench import CLAW, CONDLAPLACE, MIXEXPNORMAL, MethodConfig, Scenario, run_monte_carlo
from warpdens.grid import Grid
from warpdens.optimize import Objective, fit_fixed_J
from warpdens.sphere import (
    BALL_RADIUS,
    WarpingFunction,
    check_derivative_bound,
    exp_map,
    gamma_of,
    transport_warping,
    warping_coefficients,
)

MASTER_SEED = 7
RESULTS = []


def report(number, name, ok, detail):
    line = f"criterion {number} {'PASS' if ok else 'FAIL'} {name}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def ball_draw(rng, basis):
    c = rng.standard_normal(basis.J)
    c /= np.sqrt(basis.gram().dot(c).dot(c))
    return c * rng.uniform(0.0, BALL_RADIUS) * (1 - 1e-9)


def smooth_density(rng, grid, amplitude=0.5):
    t = grid.points
    log_f = sum(rng.uniform(-amplitude, amplitude) * np.cos(np.pi * (k + 1) * t) for k in range(3))
    return DensityFunction.from_pdf(np.exp(log_f), grid)


_runs = {}


def monte_carlo(name, n, replicates=20, seed=MASTER_SEED):
    """Cached protocol run; returns ``(summary, seconds)``."""
    key = (name, n, replicates, seed)
    if key not in _runs:
        t0 = time.perf_counter()
        summary = run_monte_carlo(Scenario(name, n, seed), replicates, MethodConfig())
        _runs[key] = (summary, time.perf_counter() - t0)
    return _runs[key]


def test_criterion_1_chart_round_trip():
    t0 = time.perf_counter()
    rng = np.random.default_rng(MASTER_SEED)
    basis = make_fourier(6, Grid(100))
    errors, signed = [], []
    for _ in range(200):
        c = ball_draw(rng, basis)
        errors.append(np.max(np.abs(warping_coefficients(gamma_of(c, basis), basis) - c)))
        signed.append(np.min(exp_map(basis.synthesize(c), basis.grid)) <= 0)
    errors, signed = np.array(errors), np.array(signed)
    secs = time.perf_counter() - t0
    bad = errors > 1e-6
    ok = report(
        1,
        "H(G(c)) = c",
        not bad.any() and secs < 5,
        f"{bad.sum()}/200 draws off by more than 1e-6 (worst {errors.max():.3g}); "
        f"{signed.sum()} draws have an SRSF that changes sign, all failures among them: "
        f"{bool(np.all(signed[bad]))}; max error on positive-SRSF draws {errors[~signed].max():.2g}; {secs:.2f} s",
    )
    assert ok


def test_criterion_2_group_action():
    t0 = time.perf_counter()
    rng = np.random.default_rng(MASTER_SEED + 1)
    grid = Grid(100)
    basis = make_fourier(6, grid)
    ident = WarpingFunction.identity(grid)
    id_err, comp_err = [], []
    for _ in range(100):
        f = smooth_density(rng, grid)
        w1, w2 = gamma_of(ball_draw(rng, basis), basis), gamma_of(ball_draw(rng, basis), basis)
        id_err.append(np.max(np.abs(warp(f, ident).pdf - f.pdf)))
        comp_err.append(np.max(np.abs(warp(warp(f, w1), w2).pdf - warp(f, compose(w1, w2)).pdf)))
    trans_err = []
    for _ in range(50):
        f1, f2 = smooth_density(rng, grid), smooth_density(rng, grid)
        trans_err.append(np.max(np.abs(warp(f1, transport_warping(f1, f2)).pdf - f2.pdf)))
    secs = time.perf_counter() - t0
    comp_err = np.array(comp_err)
    ok = report(
        2,
        "group action laws",
        max(id_err) <= 0.02 and comp_err.max() <= 0.02 and max(trans_err) <= 0.02 and secs < 10,
        f"identity max {max(id_err):.2g}; compatibility max {comp_err.max():.3g} "
        f"({np.sum(comp_err > 0.02)}/100 above 0.02); transitivity max {max(trans_err):.2g}; {secs:.2f} s",
    )
    assert ok


def test_criterion_3_derivative_bound():
    t0 = time.perf_counter()
    rng = np.random.default_rng(MASTER_SEED + 2)
    basis = make_fourier(6, Grid(100))
    gaps = []
    for _ in range(100):
        a, b = check_derivative_bound(gamma_of(ball_draw(rng, basis), basis), gamma_of(ball_draw(rng, basis), basis))
        gaps.append(a - b)
    secs = time.perf_counter() - t0
    worst = max(gaps)
    ok = report(3, "sup|gamma gap| <= sup|derivative gap|", worst <= 1e-10 and secs < 5,
                f"largest (value gap - derivative gap) {worst:.3g}; {secs:.2f} s")
    assert ok


def test_criterion_4_identifiability():
    t0 = time.perf_counter()
    rng = np.random.default_rng(MASTER_SEED + 3)
    grid = Grid(100)
    f_p = smooth_density(rng, grid, amplitude=0.4)
    basis = make_fourier(2, grid)
    c_star = np.array([0.2, -0.1])
    target = warp(f_p, gamma_of(c_star, basis))
    x = np.interp(rng.uniform(size=5000), target.cdf, grid.points)
    fit = fit_fixed_J(Objective(f_p, x, basis))
    dist = float(np.linalg.norm(fit.c_hat - c_star))
    secs = time.perf_counter() - t0
    ok = report(4, "identifiability", dist < 0.08 and secs < 60 and fit.loglik >= fit.initial_loglik,
                f"|c_hat - c*| = {dist:.4f} with c_hat = {np.round(fit.c_hat, 4).tolist()}; {secs:.1f} s")
    assert ok


@pytest.mark.slow
def test_criterion_5_mixture_table():
    summary, secs = monte_carlo(MIXEXPNORMAL, 1000)
    small, _ = monte_carlo(MIXEXPNORMAL, 100)
    l2, linf = summary.mean["l2_x100"], summary.mean["linf_x100"]
    l2_small = small.mean["l2_x100"]
    ok = report(
        5,
        "mixture n=1000 J=15",
        0.9 <= l2 <= 2.0 and 0.3 <= linf <= 0.8 and l2_small > l2 and secs < 600 and not summary.failures,
        f"L2 {l2:.3f} (sd {summary.sd['l2_x100']:.3f}) in [0.9, 2.0]; "
        f"Linf {linf:.3f} (sd {summary.sd['linf_x100']:.3f}) in [0.3, 0.8]; "
        f"L2 at n=100 {l2_small:.3f} > n=1000; {secs:.0f} s",
    )
    assert ok


@pytest.mark.slow
def test_criterion_6_claw_table():
    summary, secs = monte_carlo(CLAW, 1000)
    l2, l1, l1_kde = summary.mean["l2_x100"], summary.mean["l1_x100"], summary.baseline_mean["l1_x100"]
    Js = [r.J for r in summary.records if r.ok]
    ok = report(
        6,
        "claw n=1000 AIC search",
        0.25 <= l2 <= 0.7 and l1 <= 1.5 * l1_kde and secs < 1800 and not summary.failures,
        f"L2 {l2:.3f} (sd {summary.sd['l2_x100']:.3f}) in [0.25, 0.7]; L1 {l1:.3f} vs KDE {l1_kde:.3f} "
        f"(ratio {l1 / l1_kde:.2f} <= 1.5); selected J {min(Js)}-{max(Js)}; {secs:.0f} s",
    )
    assert ok


@pytest.mark.slow
def test_criterion_7_conditional_table():
    summary, secs = monte_carlo(CONDLAPLACE, 100)
    ise = summary.mean["ise_grid"]
    ok = report(7, "CondLaplace n=100", 0.25 <= ise <= 0.65 and secs < 600 and not summary.failures,
                f"ISE {ise:.3f} (sd {summary.sd['ise_grid']:.3f}) in [0.25, 0.65]; {secs:.0f} s")
    assert ok


@pytest.mark.slow
def test_criterion_8_likelihood_improves():
    runs = [monte_carlo(MIXEXPNORMAL, 1000), monte_carlo(MIXEXPNORMAL, 100), monte_carlo(CLAW, 1000),
            monte_carlo(CONDLAPLACE, 100)]
    checked = sum(sum(r.ok for r in s.records) for s, _ in runs)
    violations = sum(s.loglik_violations for s, _ in runs)
    ok = report(8, "final loglik >= initial loglik", violations == 0 and checked > 0,
                f"{violations} violations over {checked} fits")
    assert ok


@pytest.mark.slow
def test_criterion_9_determinism():
    first, _ = monte_carlo(MIXEXPNORMAL, 1000)
    again = run_monte_carlo(Scenario(MIXEXPNORMAL, 1000, MASTER_SEED), 20, MethodConfig())
    a, b = first.to_csv().encode(), again.to_csv().encode()
    ok = report(9, "byte-identical rerun", a == b, f"{len(a)} bytes, identical: {a == b}")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
