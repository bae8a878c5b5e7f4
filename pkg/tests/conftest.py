import numpy as np
import pytest
from hypothesis import settings

from warpdens.basis import make_fourier
from warpdens.density import DensityFunction
from warpdens.grid import Grid
from warpdens.sphere import BALL_RADIUS, exp_map

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def grid():
    return Grid(100)


def random_ball_coefficients(rng, basis, max_norm=0.95 * BALL_RADIUS):
    """Coefficients with tangent norm uniform in (0, max_norm)."""
    c = rng.standard_normal(basis.J)
    c /= np.sqrt(basis.gram().dot(c).dot(c))
    return c * rng.uniform(0.01, max_norm)


def positive_srsf_coefficients(rng, basis, max_norm=0.95 * BALL_RADIUS):
    """Ball coefficients whose SRSF stays positive, the set on which the chart is invertible."""
    while True:
        c = random_ball_coefficients(rng, basis, max_norm)
        if np.min(exp_map(basis.synthesize(c), basis.grid)) > 0:
            return c


def random_density(rng, grid, terms=3, amplitude=0.5):
    """Smooth strictly positive density: exp of a short random cosine series."""
    t = grid.points
    log_f = sum(rng.uniform(-amplitude, amplitude) * np.cos(np.pi * (k + 1) * t) for k in range(terms))
    return DensityFunction.from_pdf(np.exp(log_f), grid)


def fourier(J, T=100):
    return make_fourier(J, Grid(T))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
