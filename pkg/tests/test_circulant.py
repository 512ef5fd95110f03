import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from perspline import (CirculantMatrix, SymmetricStencil, assemble_symmetric, demko_bound, eigenvalues, inverse,
                       matvec, multiply, shift_apply, solve, spectrum)
from perspline.errors import NotSymmetricError, SingularMatrixError, SpectrumError, StencilOverlapError
from perspline.gram import gram_system, inverse_first_row
from perspline.bspline import SplineSpace

finite = st.floats(-10, 10, allow_nan=False)


def dense(c):
    n = len(c)
    return np.array([[c[(k - j) % n] for k in range(n)] for j in range(n)])


def test_shift_apply():
    V = np.array([1.0, 2, 3, 4])
    assert np.array_equal(shift_apply(0, V), V)
    assert np.array_equal(shift_apply(4, V), V)
    assert np.array_equal(shift_apply(1, V), [2, 3, 4, 1])
    assert np.array_equal(shift_apply(-1, V), [4, 1, 2, 3])


def test_shift_matrix_agrees_with_shift_apply():
    V = np.arange(7.0)
    for k in range(-3, 9):
        assert np.array_equal(CirculantMatrix.shift(7, k).to_dense() @ V, shift_apply(k, V))


def test_assemble_examples():
    C = assemble_symmetric(SymmetricStencil(8, 2 / 3, (1 / 6,)))
    assert np.allclose(C.first_row, [2 / 3, 1 / 6, 0, 0, 0, 0, 0, 1 / 6])
    D = C.to_dense()
    assert np.array_equal(D, D.T)
    A = assemble_symmetric(SymmetricStencil(8, 0.0, (1.0,), antisymmetric=True))
    assert np.array_equal(A.first_row, [0, 1, 0, 0, 0, 0, 0, -1])
    assert np.array_equal(A.to_dense(), -A.to_dense().T)


def test_assemble_wraparound_property():
    c = assemble_symmetric(SymmetricStencil(10, 1.0, (0.3, 0.2, 0.1))).first_row
    n = 10
    for j in range(1, n):
        assert c[n - j] == c[j]


def test_assemble_half_lag_and_overlap():
    # at lag n/2 both P^d and P^-d land on the same entry
    C = assemble_symmetric(SymmetricStencil(4, 1.0, (0.5, 0.25)))
    assert np.allclose(C.first_row, [1.0, 0.5, 0.5, 0.5])
    with pytest.raises(StencilOverlapError):
        assemble_symmetric(SymmetricStencil(4, 1.0, (0.5, 0.25, 0.1)))


def test_transpose():
    c = np.arange(1.0, 7.0)
    assert np.array_equal(CirculantMatrix(c).transpose().to_dense(), dense(c).T)


@settings(max_examples=40)
@given(arrays(float, st.integers(1, 40), elements=finite), st.data())
def test_matvec_matches_dense(c, data):
    V = data.draw(arrays(float, c.size, elements=finite))
    C = CirculantMatrix(c)
    ref = dense(c) @ V
    tol = 1e-12 * (1 + np.abs(c).sum() * np.abs(V).max())
    assert np.allclose(matvec(C, V, "direct"), ref, atol=tol)
    assert np.allclose(matvec(C, V, "fft"), ref, atol=tol)
    assert np.allclose(C @ V, ref, atol=tol)


def test_matvec_identity_and_n8():
    rng = np.random.default_rng(1)
    V = rng.standard_normal(8)
    assert np.array_equal(matvec(CirculantMatrix.identity(8), V), V)
    c = rng.standard_normal(8)
    assert np.allclose(matvec(CirculantMatrix(c), V), dense(c) @ V, atol=1e-13)


def test_matvec_block():
    rng = np.random.default_rng(2)
    c = rng.standard_normal(50)
    V = rng.standard_normal((50, 3))
    assert np.allclose(matvec(CirculantMatrix(c), V), dense(c) @ V, atol=1e-12)


@settings(max_examples=30)
@given(st.integers(1, 24), st.integers(0, 2 ** 32 - 1))
def test_products_commute_and_match_dense(n, seed):
    rng = np.random.default_rng(seed)
    A = CirculantMatrix(rng.standard_normal(n))
    B = CirculantMatrix(rng.standard_normal(n))
    AB, BA = multiply(A, B), multiply(B, A)
    assert np.allclose(AB.to_dense(), A.to_dense() @ B.to_dense(), atol=1e-12)
    V = rng.standard_normal(n)
    assert np.allclose(matvec(AB, V), matvec(BA, V), atol=1e-12)


def test_eigenvalues_examples():
    assert np.allclose(eigenvalues(CirculantMatrix.identity(5)), 1.0)
    C = assemble_symmetric(SymmetricStencil(4, 2.0, (1.0,)))
    lam = eigenvalues(C)
    assert np.allclose(sorted(lam), sorted(np.linalg.eigvalsh(C.to_dense())), atol=1e-14)
    assert np.allclose(lam, [4, 2, 0, 2], atol=1e-14)


def test_spectrum_matches_dense_eigenvectors():
    rng = np.random.default_rng(3)
    n = 9
    c = rng.standard_normal(n)
    D = dense(c)
    lam = spectrum(CirculantMatrix(c))
    w = np.exp(2j * np.pi / n)
    for m in range(n):
        f = w ** (m * np.arange(n))
        assert np.allclose(D @ f, lam[m] * f, atol=1e-12)


def test_eigenvalues_reject_nonsymmetric():
    with pytest.raises(NotSymmetricError):
        eigenvalues(CirculantMatrix([1.0, 2.0, 0.0, 0.0]))


def test_eigenvalues_invariant_under_shift_conjugation():
    rng = np.random.default_rng(4)
    C = assemble_symmetric(SymmetricStencil(12, 3.0, tuple(rng.standard_normal(4))))
    P = CirculantMatrix.shift(12, 5)
    conj = multiply(multiply(P, C), CirculantMatrix.shift(12, -5))
    assert np.allclose(np.sort(eigenvalues(conj)), np.sort(eigenvalues(C)), atol=1e-13)


def test_solve():
    rng = np.random.default_rng(5)
    b = rng.standard_normal(8)
    assert np.allclose(solve(CirculantMatrix.identity(8), b), b)
    C = assemble_symmetric(SymmetricStencil(8, 3.0, (0.7, 0.4, 0.2)))
    assert np.allclose(solve(C, b), np.linalg.solve(C.to_dense(), b), atol=1e-11)
    N = rng.standard_normal(8)
    C2 = CirculantMatrix(N + np.eye(8)[0] * 10)
    assert np.allclose(solve(C2, b), np.linalg.solve(C2.to_dense(), b), atol=1e-11)


@pytest.mark.parametrize("r", range(2, 7))
def test_solve_first_row_identity(r):
    gs = gram_system(SplineSpace(r, 8 * r))
    gamma = inverse_first_row(gs)
    g = gs.stencil
    assert g[0] * gamma[0] + 2 * np.dot(g[1:], gamma[1:r]) == pytest.approx(1.0, abs=1e-13)


def test_solve_singular():
    C = assemble_symmetric(SymmetricStencil(4, 2.0, (1.0,)))     # eigenvalue 0 at m = 2
    with pytest.raises(SingularMatrixError) as info:
        solve(C, np.ones(4))
    assert info.value.min_abs_eigenvalue < 1e-12


def test_inverse_matches_dense():
    C = assemble_symmetric(SymmetricStencil(10, 2.0, (0.5, -0.3)))
    assert np.allclose(inverse(C).to_dense(), np.linalg.inv(C.to_dense()), atol=1e-13)
    A = CirculantMatrix(np.array([4.0, 1.0, 0.5, 0.0, 0.2]))
    assert np.allclose(inverse(A).to_dense(), np.linalg.inv(A.to_dense()), atol=1e-13)


def test_demko_r2_closed_form():
    lo, hi = sympy.Rational(1, 3), sympy.Integer(1)
    mu, m = sympy.sqrt(lo), sympy.sqrt(hi)
    C_exact = sympy.Max(1, (mu + m) ** 2 / (2 * m ** 2)) / mu ** 2
    q_exact = (m + mu) / (m - mu)
    assert sympy.simplify(C_exact - (2 + sympy.sqrt(3))) == 0
    assert sympy.simplify(q_exact - (2 + sympy.sqrt(3))) == 0
    C_B, q_B = demko_bound(1 / 3, 1.0, 1)
    assert C_B == pytest.approx(2 + math.sqrt(3), rel=1e-14)
    assert q_B == pytest.approx(2 + math.sqrt(3), rel=1e-14)


def test_demko_monotone_in_bandwidth():
    qs = [demko_bound(0.1, 2.0, k)[1] for k in range(1, 8)]
    assert all(a > b > 1 for a, b in zip(qs, qs[1:]))


def test_demko_errors():
    with pytest.raises(SpectrumError):
        demko_bound(0.0, 1.0, 1)
    with pytest.raises(SpectrumError):
        demko_bound(1.0, 1.0, 1)


@settings(max_examples=25)
@given(n=st.integers(8, 40), k=st.integers(1, 3), seed=st.integers(0, 2 ** 32 - 1))
def test_demko_bound_on_random_banded_spd(n, k, seed):
    rng = np.random.default_rng(seed)
    A = np.zeros((n, n))
    for d in range(1, k + 1):
        off = rng.uniform(-1, 1, n - d)
        A += np.diag(off, d) + np.diag(off, -d)
    A += np.eye(n) * (np.abs(A).sum(axis=1).max() + rng.uniform(0.1, 2))
    lam = np.linalg.eigvalsh(A)
    C_B, q_B = demko_bound(lam[0], lam[-1], k)
    dist = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    assert np.all(np.abs(np.linalg.inv(A)) <= C_B * q_B ** (-dist.astype(float)) * (1 + 1e-10))
