"""Cyclic (circulant) matrices stored by their first row.

Row/column convention: ``C[j, k] = c[(k - j) mod n]`` (0-based), so that
``C = sum_j c[j] P^j`` where ``(P^k V)_i = V_{i+k}``.  Products and inverses of
circulants are circulant and everything diagonalises under the DFT.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from .errors import (NotSymmetricError, SingularMatrixError, SpectrumError,
                     SplineError, StencilOverlapError)

FloatArray = npt.NDArray[np.float64]

IMAG_TOL = 1e-12
SINGULAR_FACTOR = 1e3
# Stencils with at most this many nonzero lags use the direct O(n * band) product.
_DIRECT_BAND_LIMIT = 32


@dataclass(frozen=True, eq=False)
class CirculantMatrix:
    first_row: FloatArray = field(repr=False)

    def __post_init__(self) -> None:
        c = np.array(self.first_row, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise SplineError("first row must be a non-empty 1-d vector")
        c.setflags(write=False)
        object.__setattr__(self, "first_row", c)

    @property
    def n(self) -> int:
        return self.first_row.size

    @classmethod
    def identity(cls, n: int) -> "CirculantMatrix":
        row = np.zeros(n)
        row[0] = 1.0
        return cls(row)

    @classmethod
    def shift(cls, n: int, k: int = 1) -> "CirculantMatrix":
        """The matrix ``P^k``."""
        row = np.zeros(n)
        row[k % n] = 1.0
        return cls(row)

    def to_dense(self) -> FloatArray:
        idx = (np.arange(self.n)[None, :] - np.arange(self.n)[:, None]) % self.n
        return self.first_row[idx]

    def transpose(self) -> "CirculantMatrix":
        return CirculantMatrix(np.roll(self.first_row[::-1], 1))

    def is_symmetric(self, tol: float = 0.0) -> bool:
        c = self.first_row
        return bool(np.max(np.abs(c - np.roll(c[::-1], 1))) <= tol)

    def __matmul__(self, other):
        if isinstance(other, CirculantMatrix):
            return multiply(self, other)
        return matvec(self, other)


@dataclass(frozen=True)
class SymmetricStencil:
    """``c1 I + sum_{d>=1} offsets[d-1] (P^d + s P^{-d})`` with ``s = +1`` (or -1)."""

    n: int
    diag: float
    offsets: tuple[float, ...]
    antisymmetric: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "offsets", tuple(float(o) for o in self.offsets))
        if self.antisymmetric and self.diag != 0.0:
            raise SplineError("an antisymmetric stencil has zero diagonal")


def shift_apply(k: int, V: npt.ArrayLike) -> FloatArray:
    """``(P^k V)_i = V_{i+k}`` with indices taken modulo ``n``."""
    V = np.asarray(V)
    return np.roll(V, -k)


def assemble_symmetric(stencil: SymmetricStencil) -> CirculantMatrix:
    """First row ``(c1, c2, ..., ck, 0, ..., 0, +-ck, ..., +-c2)``.

    The stencil is summed literally as ``P^d +- P^{-d}``, so for even ``n`` a lag
    of ``n/2`` contributes twice (symmetric) or cancels (antisymmetric).
    """
    n = stencil.n
    width = len(stencil.offsets)
    if width > n // 2:
        raise StencilOverlapError(
            f"stencil with {width} off-diagonal lags does not fit a cycle of length {n}")
    row = np.zeros(n)
    row[0] = stencil.diag
    sign = -1.0 if stencil.antisymmetric else 1.0
    for d, c in enumerate(stencil.offsets, start=1):
        row[d] += c
        row[n - d] += sign * c
    return CirculantMatrix(row)


def _band(c: FloatArray) -> npt.NDArray[np.intp]:
    return np.flatnonzero(c)


def matvec(C: CirculantMatrix, V: npt.ArrayLike, method: str = "auto") -> FloatArray:
    """``C @ V`` by direct stencil sum or via the DFT."""
    V = np.asarray(V, dtype=float)
    if V.shape[0] != C.n:
        raise SplineError(f"length mismatch: matrix is {C.n}x{C.n}, vector has {V.shape[0]}")
    nz = _band(C.first_row)
    if method == "auto":
        method = "direct" if nz.size <= _DIRECT_BAND_LIMIT else "fft"
    if method == "direct":
        out = np.zeros_like(V)
        for d in nz:
            out += C.first_row[d] * np.roll(V, -d, axis=0)
        return out
    if method == "fft":
        fc = np.conj(np.fft.fft(C.first_row))
        if V.ndim > 1:
            fc = fc.reshape((-1,) + (1,) * (V.ndim - 1))
        return np.real(np.fft.ifft(fc * np.fft.fft(V, axis=0), axis=0))
    raise ValueError(f"unknown method {method!r}")


def multiply(A: CirculantMatrix, B: CirculantMatrix) -> CirculantMatrix:
    """First row of ``A B`` is the circular convolution of the first rows."""
    if A.n != B.n:
        raise SplineError("dimension mismatch")
    row = np.real(np.fft.ifft(np.fft.fft(A.first_row) * np.fft.fft(B.first_row)))
    return CirculantMatrix(row)


def spectrum(C: CirculantMatrix) -> npt.NDArray[np.complex128]:
    """``lambda_m = sum_j c_j omega^{(j-1)(m-1)}``, ``omega = exp(2 pi i / n)``."""
    return np.fft.ifft(C.first_row) * C.n


def eigenvalues(C: CirculantMatrix) -> FloatArray:
    """Real eigenvalues of a symmetric circulant, in DFT order ``theta_m = 2 pi m / n``."""
    lam = spectrum(C)
    scale = max(1.0, float(np.max(np.abs(lam))))
    resid = float(np.max(np.abs(lam.imag)))
    if resid > IMAG_TOL * scale:
        raise NotSymmetricError(f"imaginary eigenvalue residue {resid:.3e} exceeds tolerance")
    return lam.real


def solve(C: CirculantMatrix, b: npt.ArrayLike, tol: float = 1e-12) -> FloatArray:
    """Solve ``C x = b`` by DFT diagonalisation.

    Raises :class:`SingularMatrixError` if ``min |lambda| <= 1e3 eps max |lambda|``.
    """
    b = np.asarray(b, dtype=float)
    if b.shape[0] != C.n:
        raise SplineError(f"length mismatch: matrix is {C.n}x{C.n}, rhs has {b.shape[0]}")
    fc = np.conj(np.fft.fft(C.first_row))
    mags = np.abs(fc)
    if mags.min() <= SINGULAR_FACTOR * np.finfo(float).eps * mags.max():
        raise SingularMatrixError(
            f"circulant is numerically singular (min |lambda| = {mags.min():.3e})",
            float(mags.min()))
    if b.ndim > 1:
        fc = fc.reshape((-1,) + (1,) * (b.ndim - 1))

    def _apply_inverse(rhs: FloatArray) -> FloatArray:
        return np.real(np.fft.ifft(np.fft.fft(rhs, axis=0) / fc, axis=0))

    x = _apply_inverse(b)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return x
    for _ in range(3):
        res = b - matvec(C, x)
        if np.linalg.norm(res) <= tol * bnorm:
            return x
        x = x + _apply_inverse(res)
    res = np.linalg.norm(b - matvec(C, x)) / bnorm
    if res > tol:
        raise SingularMatrixError(
            f"relative residual {res:.3e} above tolerance {tol:.1e}", float(mags.min()))
    return x


def inverse(C: CirculantMatrix) -> CirculantMatrix:
    """The inverse, itself circulant; its first row is ``C^{-T} e_1``."""
    e1 = np.zeros(C.n)
    e1[0] = 1.0
    return CirculantMatrix(solve(C.transpose(), e1))


def demko_bound(lambda_min: float, lambda_max: float, k: int) -> tuple[float, float]:
    """Constants ``(C_B, q_B)`` with ``|(B^{-1})_ij| <= C_B q_B^{-|i-j|}``.

    Valid for any symmetric positive definite matrix of bandwidth ``k`` whose
    spectrum lies in ``[lambda_min, lambda_max]``.
    """
    if lambda_min <= 0.0:
        raise SpectrumError(f"lambda_min must be positive, got {lambda_min}")
    if lambda_min >= lambda_max:
        raise SpectrumError(
            f"degenerate spectrum: lambda_min {lambda_min} >= lambda_max {lambda_max}")
    if k < 1:
        raise SplineError(f"bandwidth must be >= 1, got {k}")
    mu = np.sqrt(lambda_min)
    m = np.sqrt(lambda_max)
    C_B = max(1.0, (mu + m) ** 2 / (2.0 * m * m)) / (mu * mu)
    q_B = ((m + mu) / (m - mu)) ** (1.0 / k)
    return float(C_B), float(q_B)
