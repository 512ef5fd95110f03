"""Composite Gauss-Legendre rules on the uniform mesh of [0, 1]."""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]


@lru_cache(maxsize=64)
def gauss_legendre_unit(n: int) -> tuple[FloatArray, FloatArray]:
    """``n``-point Gauss-Legendre nodes and weights on [0, 1] (exact to degree 2n-1)."""
    if n < 1:
        raise ValueError(f"need at least one node, got {n}")
    x, w = np.polynomial.legendre.leggauss(n)
    nodes, weights = 0.5 * (x + 1.0), 0.5 * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def cell_points(N: int, n: int) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Quadrature points of every cell.

    Returns ``(x, u, w)``: ``x`` has shape ``(N, n)`` with the physical points,
    ``u`` the local coordinates in [0, 1) and ``w`` the physical weights
    (already multiplied by ``h``).
    """
    u, w = gauss_legendre_unit(n)
    x = (np.arange(N)[:, None] + u[None, :]) / N
    return x, u, w / N


def integrate(f: Callable[[FloatArray], FloatArray], N: int, n: int) -> float:
    """Composite rule for ``int_0^1 f`` with ``N`` cells of ``n`` points each."""
    x, _, w = cell_points(N, n)
    return float(np.sum(f(x) * w))
