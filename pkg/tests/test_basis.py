import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from warpdens.basis import make_basis, make_fourier, make_legendre
from warpdens.grid import Grid, inner, trapezoid_integral


def test_fourier_first_element(grid):
    b = make_fourier(1, grid)
    np.testing.assert_allclose(b.functions[0], np.sqrt(2) * np.sin(2 * np.pi * grid.points), atol=1e-12)
    assert abs(trapezoid_integral(b.functions[0], grid)) < 1e-6


def test_fourier_ordering(grid):
    b = make_fourier(4, grid)
    t = grid.points
    expected = np.sqrt(2) * np.array(
        [np.sin(2 * np.pi * t), np.cos(2 * np.pi * t), np.sin(4 * np.pi * t), np.cos(4 * np.pi * t)]
    )
    np.testing.assert_allclose(b.functions, expected, atol=1e-12)


def test_fourier_gram(grid):
    assert abs(inner(*make_fourier(2, grid).functions, grid)) < 1e-6
    np.testing.assert_allclose(make_fourier(6, grid).gram(), np.eye(6), atol=1e-6)


def test_legendre_first_element(grid):
    b = make_legendre(1, grid)
    # discrete normalization differs from the analytic constant by O(step^2)
    np.testing.assert_allclose(b.functions[0], np.sqrt(3) * (2 * grid.points - 1), atol=1e-3)
    assert abs(trapezoid_integral(b.functions[0], grid)) < 1e-6


def test_legendre_gram(grid):
    np.testing.assert_allclose(make_legendre(5, grid).gram(), np.eye(5), atol=1e-4)


@given(st.sampled_from(["fourier", "legendre"]), st.integers(1, 12), st.integers(30, 200))
def test_basis_invariants(kind, J, T):
    g = Grid(T)
    b = make_basis(kind, J, g)
    assert b.functions.shape == (J, T)
    np.testing.assert_allclose(b.gram(), np.eye(J), atol=1e-4)
    for f in b.functions:
        assert abs(trapezoid_integral(f, g)) < 1e-6


@given(st.sampled_from(["fourier", "legendre"]), st.integers(1, 10), st.integers(1, 10))
def test_prefix_stability(kind, J, extra):
    g = Grid(100)
    small = make_basis(kind, J, g).functions
    big = make_basis(kind, J + extra, g).functions
    np.testing.assert_array_equal(big[:J], small)


def test_fourier_rejects_aliasing():
    with pytest.raises(ValueError):
        make_fourier(12, Grid(10))


def test_unknown_kind(grid):
    with pytest.raises(ValueError):
        make_basis("meyer", 3, grid)
