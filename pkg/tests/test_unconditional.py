import numpy as np
import pytest

from warpdens.basis import make_basis
from warpdens.density import SupportBounds, scale_sample, truncated_normal_fit, warp
from warpdens.evalbench import MIXEXPNORMAL, Scenario, mixexpnormal_pdf, sample_scenario
from warpdens.grid import Grid, trapezoid_integral
from warpdens.optimize import Objective, fit_fixed_J
from warpdens.sphere import gamma_of
from warpdens.unconditional import EstimateConfig, estimate_density, evaluate_estimate


def test_config_rules():
    assert EstimateConfig(J=5).multires is False
    with pytest.raises(ValueError):
        EstimateConfig(multires=False)
    with pytest.raises(ValueError):
        EstimateConfig(J=50, J_max=40)
    with pytest.raises(ValueError):
        EstimateConfig(initial_kind="histogram")


def test_default_restarts_follow_search_mode():
    assert EstimateConfig(J=5).options.restarts == 3
    assert EstimateConfig().options.restarts == 0


def test_rejects_bad_samples():
    with pytest.raises(ValueError):
        estimate_density([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        estimate_density(np.ones(20), EstimateConfig(J=2))
    with pytest.raises(ValueError):
        estimate_density([1, 2, np.nan, 4, 5, 6], EstimateConfig(J=2))


def test_mixture_example():
    y, _ = sample_scenario(Scenario(MIXEXPNORMAL, 1000, 31))
    est = estimate_density(y, EstimateConfig(J=15))
    g = np.linspace(0, 1, 100)
    l2_table = np.sqrt(np.sum((est(g) - mixexpnormal_pdf(g)) ** 2))
    assert 0.8 <= l2_table <= 2.2
    assert est.fit.loglik >= est.fit.initial_loglik


def test_own_family_barely_moves():
    rng = np.random.default_rng(4)
    x = rng.normal(0.0, 1.0, 1000)
    est = estimate_density(x, EstimateConfig(initial_kind="truncnorm", J=6))
    assert trapezoid_integral(np.abs(est.scaled.pdf - est.initial.pdf), est.grid) < 0.1


def test_fixed_J_matches_direct_fit():
    x = np.random.default_rng(8).gamma(2.0, 1.0, 200)
    est = estimate_density(x, EstimateConfig(J=4, initial_kind="truncnorm"))
    grid = Grid(100)
    sample = scale_sample(x, est.bounds)
    f_p = truncated_normal_fit(sample, grid)
    basis = make_basis("fourier", 4, grid)
    fit = fit_fixed_J(Objective(f_p, sample.y, basis))
    np.testing.assert_array_equal(est.fit.c_hat, fit.c_hat)
    np.testing.assert_array_equal(est.scaled.pdf, warp(f_p, gamma_of(fit.c_hat, basis)).pdf)


def test_evaluate_examples():
    x = np.random.default_rng(0).uniform(size=300)
    est = estimate_density(x, EstimateConfig(J=2, support=(0.0, 1.0)))
    assert evaluate_estimate(est, est.bounds.A - 1) == 0.0
    assert evaluate_estimate(est, 1.5) == 0.0
    fine = np.linspace(est.bounds.A, est.bounds.B, 20_001)
    assert abs(np.trapezoid(est(fine), fine) - 1) < 1e-3


def test_evaluate_uniform_is_one():
    x = np.random.default_rng(1).uniform(size=50)
    est = estimate_density(x, EstimateConfig(J=1, support=(0.0, 1.0)))
    est.scaled.pdf[:] = 1.0
    assert est(0.5) == pytest.approx(1.0)


@pytest.mark.parametrize("a,b", [(3.0, 2.0), (-10.0, 0.01)])
def test_affine_equivariance(a, b):
    x = np.random.default_rng(6).lognormal(0, 0.5, 150)
    cfg = EstimateConfig(J=4)
    e1, e2 = estimate_density(x, cfg), estimate_density(a + b * x, cfg)
    assert e2.bounds.A == pytest.approx(a + b * e1.bounds.A)
    pts = np.linspace(x.min(), x.max(), 57)
    np.testing.assert_allclose(e2(a + b * pts) * b, e1(pts), atol=1e-6)


def test_likelihood_improves_and_density_valid():
    x = np.random.default_rng(12).standard_t(4, 300)
    est = estimate_density(x, EstimateConfig(schedule=(2, 4, 6), J_max=6))
    assert est.fit.loglik >= est.fit.initial_loglik
    assert np.all(est.scaled.pdf > 0)
    assert trapezoid_integral(est.scaled.pdf, est.grid) == pytest.approx(1.0, abs=1e-6)
    assert est.fit.J_used in (2, 4, 6)
