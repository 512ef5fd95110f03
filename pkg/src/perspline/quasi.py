"""Quasiinterpolants ``Q_h u = sum_j (Q u~)_j Phi_j`` with ``u~_j = u(j h)``.

``Q = q_0 I + sum_{m=1}^{r-1} q_m (P^m + P^{-m})``.  The Thomee-Wendroff stencil
is generated in exact rational arithmetic from the series of
``(arcsin(tau) / tau)^r`` through ``q(xi) = sum_j delta_j sin^{2j}(xi / 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
import numpy.typing as npt

from .bspline import PeriodicSpline, SplineSpace
from .circulant import CirculantMatrix, SymmetricStencil, assemble_symmetric, matvec
from .errors import InvalidOrderError, SplineError
from .functions import TestFunction
from .projection import StabilityReport, check_periodic, l2_error, ratios

FloatArray = npt.NDArray[np.float64]

MAX_TW_ORDER = 12


@dataclass(frozen=True)
class DeltaSeries:
    r: int
    coefficients: tuple[Fraction, ...]


@dataclass(frozen=True)
class QuasiCoefficients:
    """Symmetric stencil ``(q_0, q_1, ..., q_{r-1})`` of the modified basis."""

    r: int
    stencil: tuple[Fraction | float, ...]

    def __post_init__(self) -> None:
        if len(self.stencil) > self.r:
            raise SplineError(f"stencil has {len(self.stencil)} entries; at most r = {self.r} allowed")

    def as_float(self) -> FloatArray:
        out = np.zeros(self.r)
        out[:len(self.stencil)] = [float(q) for q in self.stencil]
        return out

    def matrix(self, N: int) -> CirculantMatrix:
        q = self.as_float()
        return assemble_symmetric(SymmetricStencil(N, q[0], tuple(q[1:])))

    @property
    def sup_constant(self) -> float:
        """``|q_0| + 2 sum_{m>=1} |q_m|``, the sup-norm bound of ``Q_h``."""
        q = self.as_float()
        return float(abs(q[0]) + 2.0 * np.sum(np.abs(q[1:])))


def _series_mul(a: Sequence[Fraction], b: Sequence[Fraction], terms: int) -> list[Fraction]:
    out = [Fraction(0)] * terms
    for i, ai in enumerate(a[:terms]):
        if ai:
            for j, bj in enumerate(b[:terms - i]):
                out[i + j] += ai * bj
    return out


def arcsin_over_tau(terms: int) -> list[Fraction]:
    """Coefficients of ``tau^{2n}`` in ``arcsin(tau)/tau``: ``C(2n, n) / (4^n (2n + 1))``."""
    return [Fraction(math.comb(2 * n, n), 4 ** n * (2 * n + 1)) for n in range(terms)]


@lru_cache(maxsize=None)
def _tw_delta_cached(r: int, terms: int) -> tuple[Fraction, ...]:
    base = arcsin_over_tau(terms)
    acc = [Fraction(1)] + [Fraction(0)] * (terms - 1)
    for _ in range(r):
        acc = _series_mul(acc, base, terms)
    return tuple(acc)


def tw_delta(r: int, terms: int | None = None) -> DeltaSeries:
    """``delta_0..delta_{terms-1}`` of ``(arcsin(tau)/tau)^r`` in powers of ``tau^2``.

    ``terms`` defaults to ``r``, the number used by the Thomee-Wendroff stencil.
    """
    if not 2 <= r <= MAX_TW_ORDER:
        raise InvalidOrderError(f"Thomee-Wendroff coefficients supported for 2 <= r <= {MAX_TW_ORDER}")
    return DeltaSeries(r, _tw_delta_cached(r, r if terms is None else terms))


def delta_to_stencil(d: DeltaSeries) -> QuasiCoefficients:
    """Expand ``sum_j delta_j ((2 - z - 1/z) / 4)^j`` and read off ``q_k`` (coefficient of ``z^k``)."""
    n = len(d.coefficients)
    # Laurent coefficients indexed by exponent + (n - 1)
    width = 2 * n - 1
    total = [Fraction(0)] * width
    power = [Fraction(0)] * width
    power[n - 1] = Fraction(1)
    step = {-1: Fraction(-1, 4), 0: Fraction(1, 2), 1: Fraction(-1, 4)}
    for j, delta in enumerate(d.coefficients):
        if j > 0:
            nxt = [Fraction(0)] * width
            for idx, c in enumerate(power):
                if c:
                    for e, s in step.items():
                        nxt[idx + e] += c * s
            power = nxt
        for idx in range(width):
            total[idx] += delta * power[idx]
    stencil = tuple(total[n - 1:])
    if stencil != tuple(reversed(total[:n])):
        raise AssertionError("symbol lost its symmetry")
    return QuasiCoefficients(d.r, stencil)


def thomee_wendroff(r: int) -> QuasiCoefficients:
    return delta_to_stencil(tw_delta(r))


def stencil_symbol(qc: QuasiCoefficients, xi: npt.ArrayLike) -> FloatArray | float:
    """``q(xi) = q_0 + 2 sum_m q_m cos(m xi)``."""
    q = qc.as_float()
    x = np.asarray(xi, dtype=float)
    out = q[0] + 2.0 * np.sum(q[1:] * np.cos(x[..., None] * np.arange(1, q.size)), axis=-1)
    return float(out) if out.ndim == 0 else out


def delta_symbol(d: DeltaSeries, xi: npt.ArrayLike) -> FloatArray | float:
    """``sum_j delta_j sin^{2j}(xi / 2)``."""
    s2 = np.sin(0.5 * np.asarray(xi, dtype=float)) ** 2
    out = sum(float(c) * s2 ** j for j, c in enumerate(d.coefficients))
    return float(out) if np.ndim(out) == 0 else out


def exact_symbol_at(qc: QuasiCoefficients, cos_values: Sequence[int]) -> Fraction:
    """``q_0 + 2 sum_m q_m c_m`` for exact cosines ``c_m`` (e.g. ``(-1)^m`` at ``xi = pi``)."""
    q = [Fraction(v) for v in qc.stencil]
    return q[0] + 2 * sum(qm * c for qm, c in zip(q[1:], cos_values))


def node_samples(space: SplineSpace, u: TestFunction) -> FloatArray:
    """``u(jh)`` for ``j = 1..N``."""
    return u(np.arange(1, space.N + 1) / space.N)


def quasi_interpolate(space: SplineSpace, qc: QuasiCoefficients, u: TestFunction) -> PeriodicSpline:
    if qc.r != space.r:
        raise SplineError(f"stencil order {qc.r} does not match space order {space.r}")
    check_periodic(u)
    return PeriodicSpline(space, matvec(qc.matrix(space.N), node_samples(space, u)))


def tw_shift(space: SplineSpace) -> float:
    """Offset ``h (r - 2) / 2`` between this basis and the node-centred one."""
    return 0.5 * (space.r - 2) / space.N


def quasi_error(space: SplineSpace, qc: QuasiCoefficients, u: TestFunction) -> float:
    """``||Q_h u - u(. - s)||`` with ``s = h (r - 2)/2``.

    Equals the L2 error of the node-centred quasiinterpolant; for even ``r - 2``
    the shift is a whole number of cells.
    """
    return l2_error(quasi_interpolate(space, qc, u), u, shift=tw_shift(space))


def quasi_stability_report(space: SplineSpace, qc: QuasiCoefficients, u: TestFunction, l: int,
                           samples_per_cell: int = 32) -> StabilityReport:
    if not 0 <= l <= space.r - 1:
        raise SplineError(f"derivative order {l} outside 0..{space.r - 1}")
    return ratios(quasi_interpolate(space, qc, u), u, l, samples_per_cell)
