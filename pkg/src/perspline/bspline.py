"""Centered cardinal B-splines and the periodic standard basis on a uniform mesh.

The order-``r`` B-spline ``v_r`` is the ``(r-1)``-fold self-convolution of the
indicator of ``[-1/2, 1/2)``; it is supported on ``[-r/2, r/2]``.  On the mesh
``x_i = i/N`` of ``[0, 1]`` the basis function ``Phi_j`` is the 1-periodic
sum of ``v_r(N x - j - (r - 2)/2)`` so that ``supp Phi_j = [x_{j-1}, x_{j+r-1}]``
(indices wrap modulo ``N``).  Basis indices are 1-based throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import numpy.typing as npt

from .errors import DifferentiationError, InvalidOrderError, SplineError

ArrayLike = npt.ArrayLike
FloatArray = npt.NDArray[np.float64]

_FOURIER_SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class SplineSpace:
    """The ``N``-dimensional space of 1-periodic splines of order ``r``.

    Order ``r`` means piecewise polynomials of degree ``r - 1`` with ``r - 2``
    continuous derivatives.  ``r = 1`` is the piecewise constant space.
    """

    r: int
    N: int

    def __post_init__(self) -> None:
        if not isinstance(self.r, (int, np.integer)) or self.r < 1:
            raise InvalidOrderError(f"spline order must be an integer >= 1, got {self.r!r}")
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise SplineError(f"cell count must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "N", int(self.N))

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def h_exact(self) -> Fraction:
        return Fraction(1, self.N)

    @property
    def standing(self) -> bool:
        """Whether ``r >= 2`` and ``N >= 4r`` hold."""
        return self.r >= 2 and self.N >= 4 * self.r

    def nodes(self) -> FloatArray:
        return np.arange(self.N + 1) / self.N

    def lowered(self, l: int = 1) -> "SplineSpace":
        """Space of order ``r - l`` on the same mesh (home of the l-th derivatives)."""
        if not 0 <= l <= self.r - 1:
            raise DifferentiationError(
                f"cannot lower order {self.r} by {l}: need 0 <= l <= r - 1")
        return SplineSpace(self.r - l, self.N)


@dataclass(frozen=True, eq=False)
class PeriodicSpline:
    """``sum_j V_j Phi_j`` for a coefficient vector ``V`` of length ``N``."""

    space: SplineSpace
    coeffs: FloatArray = field(repr=False)

    def __post_init__(self) -> None:
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (self.space.N,):
            raise SplineError(
                f"expected {self.space.N} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __call__(self, x: ArrayLike) -> FloatArray | float:
        return spline_eval(self, x)


def _check_order(r: int) -> None:
    if r < 1:
        raise InvalidOrderError(f"B-spline order must be >= 1, got {r}")


def _recurrence(r: int, x: FloatArray, top_offsets: int) -> FloatArray:
    """Values ``v_r(x + s)`` for ``top_offsets`` consecutive unit-spaced shifts.

    The shifts are ``s_m = m - (top_offsets - 1)/2``.  Works downwards to order 1
    and back up with the symmetric degree-raising recurrence
    ``(k-1) v_k(y) = (k/2 + y) v_{k-1}(y + 1/2) + (k/2 - y) v_{k-1}(y - 1/2)``.
    Returns an array of shape ``x.shape + (top_offsets,)``.
    """
    width = r + top_offsets - 1
    # exactly one order-1 indicator is active: pick it with a single floor so that
    # rounding in x + shift cannot place x in two neighbouring cells
    active = -np.floor(x + 0.5 - (width - 1) / 2.0)
    vals = (active[..., None] == np.arange(width)).astype(float)
    for k in range(2, r + 1):
        width -= 1
        shifts = np.arange(width) - (width - 1) / 2.0
        y = x[..., None] + shifts
        vals = ((0.5 * k + y) * vals[..., 1:] + (0.5 * k - y) * vals[..., :-1]) / (k - 1)
    return vals


def cardinal_bspline_eval(r: int, x: ArrayLike) -> FloatArray | float:
    """Evaluate the centered cardinal B-spline ``v_r`` at ``x``."""
    _check_order(r)
    xa = np.asarray(x, dtype=float)
    out = _recurrence(r, xa, 1)[..., 0]
    return float(out) if out.ndim == 0 else out


def cardinal_bspline_fourier(r: int, x: ArrayLike) -> FloatArray | float:
    """Fourier transform ``(2 sin(x/2) / x)^r`` of ``v_r``, finite at ``x = 0``."""
    xa = np.asarray(x, dtype=float)
    small = np.abs(xa) < _FOURIER_SERIES_CUTOFF
    safe = np.where(small, 1.0, xa)
    base = np.where(small, 0.0, 2.0 * np.sin(0.5 * safe) / safe)
    x2 = xa * xa
    # Taylor series of 2 sin(x/2)/x
    series = 1.0 - x2 / 24.0 + x2 * x2 / 1920.0 - x2 * x2 * x2 / 322560.0
    out = np.where(small, series, base) ** r
    return float(out) if out.ndim == 0 else out


def local_basis_values(r: int, u: ArrayLike) -> FloatArray:
    """All nonzero basis values on a cell at local coordinate ``u`` in [0, 1).

    Entry ``m`` is ``v_r(u + m - r/2)``; on cell ``i`` (1-based, ``[x_{i-1}, x_i)``)
    it is the value of ``Phi_{i-m}``.
    """
    _check_order(r)
    ua = np.asarray(u, dtype=float)
    # centre offset chosen so that shift m maps to u + m - r/2
    return _recurrence(r, ua - 0.5, r)


def _cell_coordinates(N: int, x: ArrayLike) -> tuple[npt.NDArray[np.intp], FloatArray]:
    t = np.mod(np.asarray(x, dtype=float), 1.0) * N
    cell = np.floor(t)
    u = t - cell
    return cell.astype(np.intp) % N, u


def periodic_basis_eval(space: SplineSpace, j: int, x: ArrayLike) -> FloatArray | float:
    """Evaluate ``Phi_j`` at ``x`` (``j`` taken modulo ``N``; ``x`` modulo 1)."""
    r, N = space.r, space.N
    j = (int(j) - 1) % N + 1
    xa = np.asarray(x, dtype=float)
    t = np.mod(xa, 1.0) * N - j - 0.5 * (r - 2)
    lo = math.floor((float(np.min(t)) - 0.5 * r) / N) if t.size else 0
    hi = math.ceil((float(np.max(t)) + 0.5 * r) / N) if t.size else -1
    out = np.zeros_like(t)
    for lattice in range(lo, hi + 1):
        out += cardinal_bspline_eval(r, t - lattice * N)
    return float(out) if out.ndim == 0 else out


def spline_eval(s: PeriodicSpline, x: ArrayLike) -> FloatArray | float:
    """Evaluate ``sum_j V_j Phi_j(x)`` using only the ``r`` basis functions alive at x."""
    r, N = s.space.r, s.space.N
    cell, u = _cell_coordinates(N, x)
    vals = local_basis_values(r, u)
    idx = (cell[..., None] - np.arange(r)) % N
    out = np.sum(s.coeffs[idx] * vals, axis=-1)
    return float(out) if out.ndim == 0 else out


def spline_derivative(s: PeriodicSpline) -> PeriodicSpline:
    """Exact derivative as a spline of order ``r - 1``: ``W_j = (V_j - V_{j-1}) / h``."""
    if s.space.r < 2:
        raise DifferentiationError("piecewise constant splines (r = 1) cannot be differentiated")
    V = s.coeffs
    return PeriodicSpline(s.space.lowered(1), s.space.N * (V - np.roll(V, 1)))
