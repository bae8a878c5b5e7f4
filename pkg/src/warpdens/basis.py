"""Orthonormal bases for zero-mean functions on [0, 1].

Both families exclude the constant function, so every element integrates to
zero and any linear combination is a valid tangent direction at the identity
warping. Elements are normalized with the same trapezoid inner product used
elsewhere, which keeps the discrete Gram matrix at the identity.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre

from .grid import Grid, inner

FOURIER = "fourier"
LEGENDRE = "legendre"


@dataclass(frozen=True)
class BasisSet:
    """``J`` grid-sampled basis functions stored as the rows of ``functions``."""

    kind: str
    functions: np.ndarray
    grid: Grid

    @property
    def J(self) -> int:
        return self.functions.shape[0]

    def synthesize(self, c) -> np.ndarray:
        """Grid values of ``sum_j c_j b_j``."""
        c = np.asarray(c, dtype=float)
        if c.shape != (self.J,):
            raise ValueError(f"expected {self.J} coefficients, got shape {c.shape}")
        return c @ self.functions

    def gram(self) -> np.ndarray:
        w = np.full(self.grid.T, self.grid.step)
        w[[0, -1]] *= 0.5
        return (self.functions * w) @ self.functions.T


def _normalize(rows, grid):
    norms = np.sqrt([inner(r, r, grid) for r in rows])
    out = rows / norms[:, None]
    out.flags.writeable = False
    return out


def make_fourier(J: int, grid: Grid) -> BasisSet:
    """sin(2 pi t), cos(2 pi t), sin(4 pi t), cos(4 pi t), ... scaled by sqrt(2)."""
    if J < 1:
        raise ValueError("J must be at least 1")
    if (J + 1) // 2 >= (grid.T - 1) / 2:
        raise ValueError(f"J={J} aliases on a grid of {grid.T} points")
    t = grid.points
    rows = []
    for j in range(J):
        k = j // 2 + 1
        trig = np.sin if j % 2 == 0 else np.cos
        rows.append(np.sqrt(2.0) * trig(2.0 * np.pi * k * t))
    return BasisSet(FOURIER, _normalize(np.array(rows), grid), grid)


def make_legendre(J: int, grid: Grid) -> BasisSet:
    """Shifted Legendre polynomials P_1 .. P_J on [0, 1]."""
    if J < 1:
        raise ValueError("J must be at least 1")
    s = 2.0 * grid.points - 1.0
    rows = np.array([legendre.legval(s, np.eye(J + 1)[k]) for k in range(J + 1)])
    # Gram-Schmidt under the trapezoid product; P_0 is projected out and dropped.
    # Working in degree order keeps every prefix unchanged when J grows.
    out = []
    for k in range(J + 1):
        r = rows[k].copy()
        for b in out:
            r -= inner(r, b, grid) * b
        out.append(r / np.sqrt(inner(r, r, grid)))
    funcs = np.array(out[1:])
    funcs.flags.writeable = False
    return BasisSet(LEGENDRE, funcs, grid)


def make_basis(kind: str, J: int, grid: Grid) -> BasisSet:
    kind = kind.lower()
    if kind == FOURIER:
        return make_fourier(J, grid)
    if kind == LEGENDRE:
        return make_legendre(J, grid)
    raise ValueError(f"unknown basis kind {kind!r}")
