"""Acceptance checks shared by ``perspline verify-all`` and the test suite.

Each criterion returns a list of :class:`Check` records; a criterion passes when
every check passes and it finishes inside its time budget.  Reference values
come from routes independent of the code under test (dense linear algebra,
quadrature against the lattice-summed basis, exact integer arithmetic,
closed forms worked out by hand).
"""

from __future__ import annotations

import inspect
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .bspline import PeriodicSpline, SplineSpace, cardinal_bspline_eval, local_basis_values, spline_eval
from .circulant import demko_bound, eigenvalues
from .functions import CORPUS_IDS, constant, corpus_function, from_spline
from .gram import (SymbolEvaluator, banded_truncation_inverse, certify_decay, fit_decay, gram_stencil,
                   gram_stencil_by_quadrature, gram_system, inverse_first_row, decay_bound_constants,
                   weighted_gamma_sum)
from .projection import (binomial_alternating_sum, inverse_inequality_constant, l2_error, project,
                         rhs_moments, stability_report)
from .quadrature import cell_points
from .quasi import quasi_error, quasi_interpolate, quasi_stability_report, thomee_wendroff

PLATEAU_CORPUS = ("sin1", "cos2", "exp_sin")
SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: float
    passed: bool
    r: int | None = None
    N: int | None = None
    l: int | None = None
    function: str = ""


@dataclass
class CriterionResult:
    number: int
    title: str
    budget_s: float
    checks: list[Check] = field(default_factory=list)
    elapsed_s: float = 0.0

    @property
    def checks_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def within_budget(self) -> bool:
        return self.elapsed_s < self.budget_s

    @property
    def passed(self) -> bool:
        return self.checks_passed and self.within_budget

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def _le(name: str, value: float, limit: float, **where) -> Check:
    return Check(name, float(value), float(limit), bool(value <= limit), **where)


def _spread(values) -> float:
    v = np.abs(np.asarray(values, dtype=float))
    return float(v.max() / v.min())


def _plateau_meshes(r: int) -> list[int]:
    return [4 * r * 2 ** k for k in range(4)]


# 1 ---------------------------------------------------------------------------

def criterion_gram() -> list[Check]:
    out = []
    for r in range(1, 9):
        g = gram_stencil(r)
        out.append(_le("row_sum_identity", abs(g[0] + 2.0 * g[1:].sum() - 1.0), 1e-13, r=r))
        direct = np.array([cardinal_bspline_eval(2 * r, j - 1.0) for j in range(1, r + 1)])
        out.append(_le("bspline_2r_identity", np.max(np.abs(g - direct)), 1e-13, r=r))
        out.append(_le("quadrature_oracle", np.max(np.abs(g - gram_stencil_by_quadrature(r))), 1e-13, r=r))
    return out


# 2 ---------------------------------------------------------------------------

def criterion_spectral() -> list[Check]:
    out = []
    for r in range(2, 7):
        se = SymbolEvaluator(r)
        for N in (16, 64, 256):
            gs = gram_system(SplineSpace(r, N))
            lam = eigenvalues(gs.matrix)
            theta = 2.0 * np.pi * np.arange(N) / N
            out.append(_le("dft_vs_symbol", np.max(np.abs(lam - se(theta))), 1e-10, r=r, N=N))
            dense = np.linalg.eigvalsh(gs.matrix.to_dense())
            out.append(_le("dft_vs_dense_eig", np.max(np.abs(np.sort(lam) - dense)), 1e-12, r=r, N=N))
            out.append(_le("lambda_max_minus_1", abs(lam.max() - 1.0), 1e-10, r=r, N=N))
            out.append(_le("g_lower_minus_lambda_min", gs.g_lower - lam.min(), 1e-12, r=r, N=N))
    return out


# 3 ---------------------------------------------------------------------------

def criterion_demko() -> list[Check]:
    out = []
    N = 64
    idx = np.arange(N)
    dist = np.abs(idx[:, None] - idx[None, :]).astype(float)
    for r in range(2, 6):
        bt = banded_truncation_inverse(gram_system(SplineSpace(r, N)))
        C_B, q_B = demko_bound(bt.lambda_min, bt.lambda_max, r - 1)
        violations = int(np.count_nonzero(np.abs(bt.inverse) > C_B * q_B ** (-dist)))
        out.append(_le("demko_violations", violations, 0, r=r, N=N))
    return out


# 4 ---------------------------------------------------------------------------

def criterion_decay() -> list[Check]:
    out = []
    for r in range(2, 6):
        fitted, sums = [], []
        for N in (64, 128, 256, 512, 1024, 2048, 4096):
            gs = gram_system(SplineSpace(r, N))
            gamma = inverse_first_row(gs)
            sums.append(weighted_gamma_sum(gamma))
            C1, C2, q = decay_bound_constants(gs)
            if N <= 512:
                fitted.append(fit_decay(gamma, q, r=r).C1)
                cert = certify_decay(gamma, C1, C2, q, r=r)
                out.append(_le("decay_certificate_slack", cert.max_slack, cert.noise_floor, r=r, N=N))
        out.append(_le("fitted_C_spread", _spread(fitted), 1.05, r=r))
        out.append(_le("weighted_sum_spread", _spread(sums), 1.01 if r == 2 else 1.05, r=r))
    return out


# 5 ---------------------------------------------------------------------------

def criterion_r2_anchors() -> list[Check]:
    # By hand: v_4(0) = 2/3, v_4(1) = 1/6; min of (2 + cos t)/3 is 1/3; the
    # stencil (1/6, 2/3, 1/6) has characteristic roots of rho^2 + 4 rho + 1.
    # With lambda in [1/3, 1] and bandwidth 1 both Demko constants reduce to 2 + sqrt(3).
    out = []
    g = gram_stencil(2)
    out.append(_le("stencil", np.max(np.abs(g - [2.0 / 3.0, 1.0 / 6.0])), 1e-15, r=2))
    gs = gram_system(SplineSpace(2, 64))
    out.append(_le("g_lower", abs(gs.g_lower - 1.0 / 3.0), 1e-13, r=2))
    root = float(np.min(np.abs(np.roots([1.0, 4.0, 1.0]))))
    gamma = inverse_first_row(gs)
    i = np.arange(2, 64 // 4 + 1)
    ratio = np.abs(gamma[i] / gamma[i - 1])
    out.append(_le("gamma_ratio", np.max(np.abs(ratio - root)), 1e-6, r=2, N=64))
    out.append(_le("gamma_ratio_closed_form", abs(root - (2.0 - SQRT3)), 1e-15, r=2))
    C_B, q_B = demko_bound(1.0 / 3.0, 1.0, 1)
    out.append(_le("demko_C", abs(C_B - (2.0 + SQRT3)), 1e-9, r=2))
    out.append(_le("demko_q", abs(q_B - (2.0 + SQRT3)), 1e-9, r=2))
    return out


# 6 ---------------------------------------------------------------------------

def _meshes_upto(r: int, limit: int = 256) -> list[int]:
    return [N for N in (4 * r * 2 ** k for k in range(8)) if N <= limit]


def criterion_projection(seed: int = 0) -> list[Check]:
    out = []
    rng = np.random.default_rng(seed)
    corpus = [corpus_function(name, seed) for name in CORPUS_IDS]
    for r in range(2, 6):
        for N in _meshes_upto(r):
            space = SplineSpace(r, N)
            for u in corpus:
                res = project(space, u)
                ph = from_spline(res.spline)
                ortho = np.max(np.abs(res.rhs - rhs_moments(space, ph)))
                out.append(_le("orthogonality", ortho, 1e-10, r=r, N=N, function=u.label))
                again = project(space, ph).coeffs
                out.append(_le("idempotence", np.max(np.abs(again - res.coeffs)), 1e-12,
                               r=r, N=N, function=u.label))
                rep = stability_report(space, u, 0)
                out.append(_le("l0_ratio_l2", rep.ratio_l2, 1.0 + 1e-12, r=r, N=N, l=0, function=u.label))
            V = rng.standard_normal(N)
            back = project(space, from_spline(PeriodicSpline(space, V))).coeffs
            out.append(_le("exact_on_space", np.max(np.abs(back - V)), 1e-11, r=r, N=N))
    return out


# 7 ---------------------------------------------------------------------------

def _plateau_checks(kind: str, ls: Callable[[int], range]) -> list[Check]:
    out = []
    for r in (2, 3, 4):
        qc = thomee_wendroff(r)
        for name in PLATEAU_CORPUS:
            u = corpus_function(name)
            for l in ls(r):
                reps = []
                for N in _plateau_meshes(r):
                    space = SplineSpace(r, N)
                    reps.append(stability_report(space, u, l) if kind == "projection"
                                else quasi_stability_report(space, qc, u, l))
                for norm in ("l2", "sup"):
                    vals = [getattr(p, f"ratio_{norm}") for p in reps]
                    out.append(_le(f"{kind}_{norm}_plateau", _spread(vals), 1.05, r=r, l=l, function=name))
    return out


def criterion_projection_plateaus() -> list[Check]:
    return _plateau_checks("projection", lambda r: range(0, r))


# 8 ---------------------------------------------------------------------------

def criterion_binomial() -> list[Check]:
    out = []
    worst_plain = max(abs(binomial_alternating_sum(l, k)) for l in range(1, 13) for k in range(l))
    out.append(_le("a_k_below_l", worst_plain, 0))
    for l in range(0, 13):
        worst = max(abs(binomial_alternating_sum(l, k, l // 2)) for k in range(l + 1))
        out.append(_le("shifted_sum_k_le_l", worst, 0, l=l))
    for l in range(1, 13):
        err = abs(binomial_alternating_sum(l, l) - (-1) ** l * math.factorial(l))
        out.append(_le("a_l_sharpness", err, 0, l=l))
    return out


# 9 ---------------------------------------------------------------------------

def criterion_quasi(seed: int = 0) -> list[Check]:
    out = []
    qc2 = thomee_wendroff(2)
    out.append(Check("tw_r2_stencil", 0.0, 0.0,
                     qc2.stencil == (Fraction(7, 6), Fraction(-1, 12)), r=2))
    for r in range(2, 13):
        q = thomee_wendroff(r).stencil
        total = q[0] + 2 * sum(q[1:])
        out.append(Check("q0_exact", float(total - 1), 0.0, total == 1, r=r))
    for r in range(2, 9):
        space = SplineSpace(r, 4 * r)
        qc = thomee_wendroff(r)
        s = quasi_interpolate(space, qc, constant(1.0))
        x = np.linspace(0.0, 1.0, 1001)
        out.append(_le("reproduces_one", np.max(np.abs(np.asarray(spline_eval(s, x)) - 1.0)), 1e-13, r=r))
    corpus = [corpus_function(name, seed) for name in CORPUS_IDS]
    for r in range(2, 6):
        qc = thomee_wendroff(r)
        for N in _meshes_upto(r):
            for u in corpus:
                rep = quasi_stability_report(SplineSpace(r, N), qc, u, 0)
                out.append(_le("sup_bound_C0", rep.ratio_sup - qc.sup_constant, 1e-12,
                               r=r, N=N, l=0, function=u.label))
    out.extend(_plateau_checks("quasi", lambda r: range(1, r)))
    return out


# 10 --------------------------------------------------------------------------

def observed_orders(errors, meshes) -> np.ndarray:
    e = np.asarray(errors, dtype=float)
    n = np.asarray(meshes, dtype=float)
    return np.log(e[:-1] / e[1:]) / np.log(n[1:] / n[:-1])


def criterion_convergence() -> list[Check]:
    out = []
    meshes = [16, 32, 64, 128, 256]
    for r in (2, 3, 4):
        qc = thomee_wendroff(r)
        for name in PLATEAU_CORPUS:
            u = corpus_function(name)
            ep = [l2_error(project(SplineSpace(r, N), u).spline, u) for N in meshes]
            eq = [quasi_error(SplineSpace(r, N), qc, u) for N in meshes]
            for label, err in (("projection", ep), ("quasi", eq)):
                order = observed_orders(err, meshes)[-1]
                out.append(_le(f"{label}_order_deviation", abs(order - r), 0.2, r=r, function=name))
    return out


# 11 --------------------------------------------------------------------------

def _many_spline_norms(space: SplineSpace, V: np.ndarray, nodes: int) -> np.ndarray:
    """L2 norms of the splines with coefficient columns ``V`` by per-cell quadrature."""
    N, r = space.N, space.r
    _, loc, w = cell_points(N, nodes)
    B = local_basis_values(r, loc)                                   # (nodes, r)
    idx = (np.arange(N)[:, None] - np.arange(r)[None, :]) % N        # (N, r)
    vals = np.einsum("qm,cmk->cqk", B, V[idx])                       # (N, nodes, K)
    return np.sqrt(np.einsum("q,cqk->k", w, vals ** 2))


def criterion_inverse_inequality(seed: int = 0) -> list[Check]:
    out = []
    rng = np.random.default_rng(seed)
    for r in range(2, 6):
        constants = []
        for N in (32, 64, 128, 256):
            space = SplineSpace(r, N)
            C = inverse_inequality_constant(space)
            constants.append(C)
            V = rng.standard_normal((N, 200))
            dV = N * (V - np.roll(V, 1, axis=0))
            ratio = _many_spline_norms(space.lowered(1), dV, r) / _many_spline_norms(space, V, r)
            out.append(_le("random_ratio_over_bound", float(np.max(ratio)) / (C * N), 1.0 + 1e-12, r=r, N=N))
        out.append(_le("constant_spread", _spread(constants), 1.01, r=r))
    return out


CRITERIA: list[tuple[int, str, float, Callable[..., list[Check]]]] = [
    (1, "Gram stencil correctness", 1.0, criterion_gram),
    (2, "Spectral consistency", 5.0, criterion_spectral),
    (3, "Banded inverse decay (Demko)", 10.0, criterion_demko),
    (4, "Inverse first-row decay and weighted sums", 20.0, criterion_decay),
    (5, "r=2 closed-form anchors", 1.0, criterion_r2_anchors),
    (6, "Projection identities", 30.0, criterion_projection),
    (7, "Projection stability plateaus", 60.0, criterion_projection_plateaus),
    (8, "Alternating binomial sums", 1.0, criterion_binomial),
    (9, "Quasiinterpolant stencil and stability", 30.0, criterion_quasi),
    (10, "Convergence rates", 30.0, criterion_convergence),
    (11, "Inverse inequality", 10.0, criterion_inverse_inequality),
]


def run_criterion(number: int, seed: int = 0) -> CriterionResult:
    for num, title, budget, fn in CRITERIA:
        if num == number:
            res = CriterionResult(num, title, budget)
            start = time.perf_counter()
            res.checks = fn(seed=seed) if "seed" in inspect.signature(fn).parameters else fn()
            res.elapsed_s = time.perf_counter() - start
            return res
    raise KeyError(f"no acceptance criterion {number}")


def run_all(seed: int = 0) -> list[CriterionResult]:
    return [run_criterion(num, seed) for num, *_ in CRITERIA]


def summary_line(res: CriterionResult) -> str:
    status = "PASS" if res.passed else "FAIL"
    line = (f"[{status}] criterion {res.number:2d}: {res.title} "
            f"({len(res.checks) - len(res.failures())}/{len(res.checks)} checks, "
            f"{res.elapsed_s:.2f}s / {res.budget_s:g}s)")
    bad = res.failures()
    if bad:
        worst = max(bad, key=lambda c: c.value - c.limit)
        where = ", ".join(f"{k}={getattr(worst, k)}" for k in ("r", "N", "l") if getattr(worst, k) is not None)
        if worst.function:
            where += f", {worst.function}" if where else worst.function
        line += f"; worst: {worst.name} = {worst.value:.6g} > {worst.limit:g} ({where})"
    elif not res.within_budget:
        line += "; over time budget"
    return line
