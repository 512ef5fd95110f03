"""Gram system of the periodic spline space, its Fourier symbol and inverse decay.

``G_ij = h^{-1} (Phi_j, Phi_i)`` is a symmetric banded circulant with stencil
``g_j = v_{2r}(j - 1)``, ``j = 1..r``.  Its eigenvalues are samples of the symbol
``g(theta) = sum_l vhat_r(theta + 2 pi l)^2 = g_1 + 2 sum_j g_j cos((j-1) theta)``
which lies in ``[g_lower, 1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
import numpy.typing as npt

from .bspline import SplineSpace, cardinal_bspline_eval, cardinal_bspline_fourier, periodic_basis_eval
from .circulant import (CirculantMatrix, SymmetricStencil, assemble_symmetric, demko_bound,
                        solve)
from .errors import SizeLimitError, SpectrumError, SplineError
from .quadrature import cell_points

FloatArray = npt.NDArray[np.float64]

DEFAULT_TAIL_TOL = 1e-14
MAX_LATTICE_TRUNCATION = 1_000_000
BOUNDS_TOL = 1e-10
DENSE_LIMIT = 1024


@lru_cache(maxsize=None)
def _stencil_cached(r: int) -> tuple[float, ...]:
    return tuple(float(v) for v in cardinal_bspline_eval(2 * r, np.arange(r, dtype=float)))


def gram_stencil(r: int) -> FloatArray:
    """``(g_1, ..., g_r)`` with ``g_j = v_{2r}(j - 1)``; independent of ``N``."""
    if r < 1:
        raise SplineError(f"order must be >= 1, got {r}")
    return np.array(_stencil_cached(r))


def gram_stencil_by_quadrature(r: int) -> FloatArray:
    """Same stencil from ``h^{-1} int Phi_j Phi_1`` by per-cell Gauss quadrature.

    Uses the periodic basis directly on a mesh wide enough that no wrap-around
    overlap occurs; ``r`` nodes per cell integrate the degree ``2r - 2`` products
    exactly.
    """
    space = SplineSpace(r, 4 * r)
    x, _, w = cell_points(space.N, r)
    phi1 = periodic_basis_eval(space, 1, x)
    return np.array([
        space.N * np.sum(w * phi1 * periodic_basis_eval(space, j, x)) for j in range(1, r + 1)
    ])


def cosine_symbol(stencil: npt.ArrayLike, theta: npt.ArrayLike) -> FloatArray | float:
    """``c_1 + 2 sum_{j>=2} c_j cos((j-1) theta)`` for a symmetric stencil."""
    c = np.asarray(stencil, dtype=float)
    th = np.asarray(theta, dtype=float)
    k = np.arange(1, c.size)
    out = c[0] + 2.0 * np.sum(c[1:] * np.cos(th[..., None] * k), axis=-1)
    return float(out) if out.ndim == 0 else out


def lattice_tail_bound(r: int, L: int) -> float:
    """Upper bound for ``sum_{|l|>L} vhat_r(x + 2 pi l)^2`` over ``x`` in [0, 2 pi].

    Uses ``vhat_r(x + 2 pi l)^2 <= (pi (|l| - 1))^{-2r}`` and an integral tail
    estimate for ``sum_{k>=L} k^{-2r}``.
    """
    s = 2 * r
    return 2.0 * math.pi ** (-s) * (L ** (-s) + L ** (1 - s) / (s - 1))


@dataclass(frozen=True)
class SymbolEvaluator:
    """Truncated lattice sum for the Gram symbol with a certified tail."""

    r: int
    tail_tol: float = DEFAULT_TAIL_TOL

    @cached_property
    def truncation(self) -> int:
        if self.r < 2:
            raise SpectrumError(
                "the order-1 lattice sum decays like 1/l^2; no practical truncation "
                "certifies the tail (the symbol is identically 1)")
        L = 1
        while lattice_tail_bound(self.r, L) > self.tail_tol:
            L *= 2
            if L > MAX_LATTICE_TRUNCATION:
                raise SpectrumError(
                    f"tail_tol={self.tail_tol:g} needs more than {MAX_LATTICE_TRUNCATION} "
                    f"lattice terms for r={self.r}")
        lo, hi = L // 2, L
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if lattice_tail_bound(self.r, mid) > self.tail_tol:
                lo = mid
            else:
                hi = mid
        return max(hi, 1)

    def __call__(self, theta: npt.ArrayLike) -> FloatArray | float:
        th = np.mod(np.asarray(theta, dtype=float), 2.0 * np.pi)
        L = self.truncation
        out = np.zeros_like(th)
        chunk = 4096
        flat = th.reshape(-1)
        acc = out.reshape(-1)
        for start in range(-L, L + 1, chunk):
            lat = np.arange(start, min(start + chunk, L + 1))
            acc += np.sum(cardinal_bspline_fourier(self.r, flat[:, None] + 2.0 * np.pi * lat) ** 2,
                          axis=1)
        return float(out) if out.ndim == 0 else out


def symbol_eval(se: SymbolEvaluator, theta: npt.ArrayLike) -> FloatArray | float:
    return se(theta)


@lru_cache(maxsize=None)
def _bounds_cached(r: int, samples: int) -> tuple[float, float]:
    stencil = gram_stencil(r)
    n = samples
    prev = None
    while True:
        vals = cosine_symbol(stencil, 2.0 * np.pi * np.arange(n) / n)
        cur = (float(vals.min()), float(vals.max()))
        if prev is not None and max(abs(cur[0] - prev[0]), abs(cur[1] - prev[1])) < BOUNDS_TOL:
            return cur
        if n >= 1 << 22:
            return cur
        prev = cur
        n *= 2


def spectral_bounds(se: SymbolEvaluator | int, samples: int = 1024) -> tuple[float, float]:
    """``(g_lower, g_upper)`` from the cosine form of the symbol on a refined grid.

    The grid is doubled until successive estimates agree to 1e-10.  The whole
    period is scanned; no minimiser is assumed.
    """
    if samples < 1024:
        raise SplineError(f"samples must be >= 1024, got {samples}")
    r = se.r if isinstance(se, SymbolEvaluator) else int(se)
    return _bounds_cached(r, samples)


@dataclass(frozen=True, eq=False)
class GramSystem:
    space: SplineSpace
    stencil: FloatArray = field(repr=False)
    matrix: CirculantMatrix = field(repr=False)
    g_lower: float
    g_upper: float

    @classmethod
    def build(cls, space: SplineSpace) -> "GramSystem":
        stencil = gram_stencil(space.r)
        matrix = assemble_symmetric(SymmetricStencil(space.N, stencil[0], tuple(stencil[1:])))
        lo, hi = spectral_bounds(space.r)
        return cls(space, stencil, matrix, lo, hi)

    @property
    def r(self) -> int:
        return self.space.r

    @property
    def N(self) -> int:
        return self.space.N

    def quadratic_form(self, V: npt.ArrayLike) -> float:
        """``<G V, V>``."""
        V = np.asarray(V, dtype=float)
        return float(V @ (self.matrix @ V))


def gram_system(space: SplineSpace) -> GramSystem:
    return GramSystem.build(space)


def inverse_first_row(gs: GramSystem) -> FloatArray:
    """First row ``gamma`` of ``G^{-1}`` (equal to its first column by symmetry)."""
    e1 = np.zeros(gs.N)
    e1[0] = 1.0
    return solve(gs.matrix, e1)


@dataclass(frozen=True)
class DecayCertificate:
    C1: float
    C2: float
    q: float
    fitted: bool
    max_slack: float
    noise_floor: float = 0.0

    @property
    def certified(self) -> bool:
        return self.max_slack <= self.noise_floor


def _decay_window(gamma: FloatArray, q: float, r: int) -> tuple[FloatArray, FloatArray, FloatArray]:
    N = gamma.size
    i = np.arange(r, N // 2 + 2)
    logq = math.log(q)
    near = np.exp(-(i - 1) * logq)
    far = np.exp(-(N - i) * logq)
    return np.abs(gamma[i - 1]), near, far


def _default_floor(gamma: FloatArray) -> float:
    # rounding level of an FFT solve; entries below it carry no decay information
    return 100.0 * np.finfo(float).eps * float(np.max(np.abs(gamma)))


def certify_decay(gamma: npt.ArrayLike, C1: float, C2: float, q: float, *, r: int,
                  noise_floor: float | None = None) -> DecayCertificate:
    """Check ``|gamma_i| <= C1 q^{-(i-1)} + C2 q^{-(N-i)}`` for ``i = r..floor(N/2)+1``.

    ``max_slack`` is the largest excess ``|gamma_i| - bound`` (negative when the
    bound holds strictly).  Excess up to ``noise_floor`` is attributed to
    floating-point rounding in ``gamma``.
    """
    if q <= 1.0:
        raise SplineError(f"decay rate q must exceed 1, got {q}")
    if C1 < 0 or C2 < 0:
        raise SplineError("decay constants must be nonnegative")
    g = np.asarray(gamma, dtype=float)
    mag, near, far = _decay_window(g, q, r)
    floor = _default_floor(g) if noise_floor is None else noise_floor
    slack = float(np.max(mag - (C1 * near + C2 * far))) if mag.size else -math.inf
    return DecayCertificate(C1, C2, q, False, slack, floor)


def fit_decay(gamma: npt.ArrayLike, q: float, *, r: int,
              noise_floor: float | None = None) -> DecayCertificate:
    """Least ``C = C1 = C2`` making the decay bound hold at rate ``q``.

    Entries at or below ``noise_floor`` do not constrain the fit.
    """
    if q <= 1.0:
        raise SplineError(f"decay rate q must exceed 1, got {q}")
    g = np.asarray(gamma, dtype=float)
    floor = _default_floor(g) if noise_floor is None else noise_floor
    mag, near, far = _decay_window(g, q, r)
    keep = mag > floor
    C = float(np.max(mag[keep] / (near[keep] + far[keep]))) if keep.any() else 0.0
    slack = float(np.max(mag - C * (near + far))) if mag.size else -math.inf
    return DecayCertificate(C, C, q, True, slack, floor)


def decay_bound_constants(gs: GramSystem) -> tuple[float, float, float]:
    """``(C1, C2, q)`` for the decay bound built from the banded-inverse estimate.

    ``q`` and ``C`` come from :func:`demko_bound` on the interval
    ``[g_lower, 1]`` with bandwidth ``r - 1``; that interval contains the spectrum
    of the banded truncation for every ``N``.
    """
    r = gs.r
    if r < 2:
        raise SplineError("decay constants need r >= 2")
    C, q = demko_bound(gs.g_lower, 1.0, r - 1)
    g = gs.g_lower
    C1 = (1.0 + (q ** (r - 1) - q) / (g * (q - 1.0))) * C
    C2 = (q ** (r - 2) + (q ** (r - 2) - 1.0) / (g * (q - 1.0))) * C
    return C1, C2, q


@dataclass(frozen=True, eq=False)
class BandedTruncation:
    matrix: FloatArray = field(repr=False)
    inverse: FloatArray = field(repr=False)
    lambda_min: float
    lambda_max: float


def banded_truncation_inverse(gs: GramSystem, tol: float = 1e-12) -> BandedTruncation:
    """Dense inverse of ``G`` with its wrap-around corners removed.

    Checks positive definiteness through ``lambda_min >= g_lower - tol``.
    """
    N, r = gs.N, gs.r
    if N > DENSE_LIMIT:
        raise SizeLimitError(f"dense banded truncation limited to N <= {DENSE_LIMIT}, got {N}")
    dense = gs.matrix.to_dense()
    i = np.arange(N)
    dense[np.abs(i[:, None] - i[None, :]) > r - 1] = 0.0
    lam = np.linalg.eigvalsh(dense)
    lmin, lmax = float(lam[0]), float(lam[-1])
    if lmin < gs.g_lower - tol:
        raise SpectrumError(
            f"banded truncation has lambda_min {lmin:.3e} below g_lower {gs.g_lower:.3e}")
    return BandedTruncation(dense, np.linalg.inv(dense), lmin, lmax)


def weighted_gamma_sum(gamma: npt.ArrayLike, start: int = 1) -> float:
    """``sum_{i=start}^{floor(N/2)+1} (1 + i) |gamma_i|``."""
    g = np.asarray(gamma, dtype=float)
    i = np.arange(start, g.size // 2 + 2)
    return float(np.sum((1.0 + i) * np.abs(g[i - 1])))
