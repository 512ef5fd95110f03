"""L2 projection onto the periodic spline space and its stability measurements."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from .bspline import PeriodicSpline, SplineSpace, local_basis_values, spline_derivative, spline_eval
from .circulant import solve
from .errors import DifferentiationError, NonPeriodicError, SplineError
from .functions import TestFunction
from .gram import cosine_symbol, gram_stencil, gram_system
from .quadrature import cell_points

FloatArray = npt.NDArray[np.float64]

PERIODICITY_TOL = 1e-10
RHS_REFINEMENT_TOL = 1e-12


class QuadratureNotConverged(SplineError):
    pass


def default_nodes_per_cell(r: int) -> int:
    return max(2 * r, 10)


def _moments(space: SplineSpace, u: TestFunction, n: int) -> FloatArray:
    r, N = space.r, space.N
    x, loc, w = cell_points(N, n)
    vals = local_basis_values(r, loc)                     # (n, r)
    fx = u(x) * w                                         # (N, n)
    contrib = fx @ vals                                   # (N, r): cell c, Phi_{c+1-m}
    idx = (np.arange(N)[:, None] - np.arange(r)[None, :]) % N
    return np.bincount(idx.ravel(), weights=contrib.ravel(), minlength=N)


def check_periodic(u: TestFunction, tol: float = PERIODICITY_TOL) -> None:
    ends = u(np.array([0.0, 1.0]))
    if abs(ends[0] - ends[1]) > tol:
        raise NonPeriodicError(
            f"{u.label}: |u(0) - u(1)| = {abs(ends[0] - ends[1]):.3e} exceeds {tol:g}")


def rhs_moments(space: SplineSpace, u: TestFunction, nodes_per_cell: int | None = None,
                check_convergence: bool = False) -> FloatArray:
    """``b_i = (u, Phi_i)`` by composite Gauss-Legendre on the mesh cells.

    With ``check_convergence`` the rule is repeated with twice the nodes and
    :class:`QuadratureNotConverged` is raised if ``b`` moves by 1e-12 or more.
    """
    check_periodic(u)
    n = default_nodes_per_cell(space.r) if nodes_per_cell is None else nodes_per_cell
    if n < space.r:
        raise SplineError(f"nodes_per_cell must be >= r = {space.r}, got {n}")
    b = _moments(space, u, n)
    if check_convergence:
        change = float(np.max(np.abs(_moments(space, u, 2 * n) - b)))
        if change >= RHS_REFINEMENT_TOL:
            raise QuadratureNotConverged(
                f"{u.label}: doubling {n} nodes per cell changed b by {change:.3e}")
    return b


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    spline: PeriodicSpline
    rhs: FloatArray = field(repr=False)
    nodes_per_cell: int

    @property
    def coeffs(self) -> FloatArray:
        return self.spline.coeffs


def project(space: SplineSpace, u: TestFunction, nodes_per_cell: int | None = None) -> ProjectionResult:
    """``P_h u``: solve ``h G c = b``."""
    n = default_nodes_per_cell(space.r) if nodes_per_cell is None else nodes_per_cell
    b = rhs_moments(space, u, n)
    gs = gram_system(space)
    c = solve(gs.matrix, space.N * b)
    return ProjectionResult(PeriodicSpline(space, c), b, n)


def difference_power(V: npt.ArrayLike, l: int) -> FloatArray:
    """``(I - P^{-1})^l V`` through the binomial expansion ``sum_m C(l,m) (-1)^m P^{-m}``."""
    V = np.asarray(V, dtype=float)
    return sum((-1) ** m * math.comb(l, m) * np.roll(V, m) for m in range(l + 1))


def derivative_power(s: PeriodicSpline, l: int) -> PeriodicSpline:
    """``l``-th derivative, a spline of order ``r - l`` with coefficients ``h^{-l} (I - P^{-1})^l V``."""
    if not 0 <= l <= s.space.r - 1:
        raise DifferentiationError(f"derivative order {l} outside 0..{s.space.r - 1}")
    for _ in range(l):
        s = spline_derivative(s)
    return s


def sobolev_seminorm(s: PeriodicSpline, l: int = 0) -> float:
    """``||d^l s / dx^l||`` from the Gram form of the order ``r - l`` space."""
    d = derivative_power(s, l)
    q = gram_system(d.space).quadratic_form(d.coeffs)
    return math.sqrt(max(q, 0.0) * d.space.h)


def spline_seminorm_quadrature(s: PeriodicSpline, l: int = 0) -> float:
    """Same norm by per-cell Gauss quadrature of the squared derivative."""
    d = derivative_power(s, l)
    x, _, w = cell_points(d.space.N, max(d.space.r, 1))
    return math.sqrt(float(np.sum(w * np.asarray(spline_eval(d, x)) ** 2)))


def sample_grid(N: int, samples_per_cell: int) -> FloatArray:
    """Uniform grid of ``N * samples_per_cell`` points in [0, 1), containing every node."""
    return np.arange(N * samples_per_cell) / (N * samples_per_cell)


def sup_norm(s: PeriodicSpline, samples_per_cell: int = 32) -> float:
    """``max |s|`` over a uniform sample grid; a lower bound for the true sup norm."""
    if samples_per_cell < 8:
        raise SplineError(f"samples_per_cell must be >= 8, got {samples_per_cell}")
    return float(np.max(np.abs(spline_eval(s, sample_grid(s.space.N, samples_per_cell)))))


def sup_norm_refinement(s: PeriodicSpline, samples_per_cell: int = 32) -> float:
    """Change of :func:`sup_norm` when the grid is doubled."""
    return abs(sup_norm(s, 2 * samples_per_cell) - sup_norm(s, samples_per_cell))


def function_l2_norm(u: TestFunction, l: int = 0, cells: int = 256, nodes: int = 16) -> float:
    x, _, w = cell_points(cells, nodes)
    return math.sqrt(float(np.sum(w * u.d(l, x) ** 2)))


def function_sup_norm(u: TestFunction, N: int, l: int = 0, samples_per_cell: int = 32) -> float:
    return float(np.max(np.abs(u.d(l, sample_grid(N, samples_per_cell)))))


def l2_error(s: PeriodicSpline, u: TestFunction, shift: float = 0.0, nodes: int = 16) -> float:
    """``||s - u(. - shift)||`` by composite Gauss quadrature on the spline mesh."""
    x, _, w = cell_points(s.space.N, nodes)
    diff = np.asarray(spline_eval(s, x)) - u(x - shift)
    return math.sqrt(float(np.sum(w * diff ** 2)))


@dataclass(frozen=True)
class StabilityReport:
    """Ratios ``||d^l(Au)|| / ||d^l u||`` in L2 and sup norm; ``None`` if ``d^l u = 0``."""

    r: int
    N: int
    l: int
    label: str
    ratio_l2: float | None
    ratio_sup: float | None


# below this the derivative is treated as identically zero
_ZERO_NORM = 1e-300


def ratios(approx: PeriodicSpline, u: TestFunction, l: int, samples_per_cell: int = 32) -> StabilityReport:
    space = approx.space
    num_l2 = sobolev_seminorm(approx, l)
    num_sup = sup_norm(derivative_power(approx, l), samples_per_cell)
    # a multiple of N keeps any kinks of u (e.g. a spline) on quadrature cell edges
    den_l2 = function_l2_norm(u, l, cells=space.N * -(-256 // space.N))
    den_sup = function_sup_norm(u, space.N, l, samples_per_cell)
    return StabilityReport(
        space.r, space.N, l, u.label,
        num_l2 / den_l2 if den_l2 > _ZERO_NORM else None,
        num_sup / den_sup if den_sup > _ZERO_NORM else None,
    )


def stability_report(space: SplineSpace, u: TestFunction, l: int, nodes_per_cell: int | None = None,
                     samples_per_cell: int = 32) -> StabilityReport:
    if not 0 <= l <= space.r - 1:
        raise DifferentiationError(f"derivative order {l} outside 0..{space.r - 1}")
    return ratios(project(space, u, nodes_per_cell).spline, u, l, samples_per_cell)


def binomial_alternating_sum(l: int, k: int, shift: int = 0) -> int:
    """``sum_{m=0}^{l} C(l, m) (m - shift)^k (-1)^m`` in exact integer arithmetic.

    Vanishes for ``k <= l - 1`` whatever the shift; at ``k = l`` it is ``(-1)^l l!``
    for every shift (the ``m^l`` coefficient survives, lower powers cancel).
    """
    if l < 0 or k < 0:
        raise SplineError(f"l and k must be nonnegative, got l={l}, k={k}")
    return sum(math.comb(l, m) * (m - shift) ** k * (-1) ** m for m in range(l + 1))


def inverse_inequality_constant(space: SplineSpace) -> float:
    """Best ``C`` with ``||v'|| <= C h^{-1} ||v||`` on this space.

    For a Fourier mode ``theta`` the squared ratio ``h^2 ||v'||^2 / ||v||^2`` is
    ``|1 - e^{-i theta}|^2 g_{r-1}(theta) / g_r(theta)``; the maximum is taken
    over ``theta_m = 2 pi m / N``.
    """
    r = space.r
    if r < 2:
        raise SplineError("the inverse inequality needs r >= 2")
    theta = 2.0 * np.pi * np.arange(space.N) / space.N
    ratio = (4.0 * np.sin(0.5 * theta) ** 2 * cosine_symbol(gram_stencil(r - 1), theta)
             / cosine_symbol(gram_stencil(r), theta))
    return math.sqrt(float(np.max(ratio)))
