import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from perspline import (PeriodicSpline, SplineSpace, quasi_error, quasi_interpolate, quasi_stability_report,
                       thomee_wendroff, tw_delta)
from perspline.bspline import cardinal_bspline_fourier, spline_eval
from perspline.errors import InvalidOrderError, SplineError
from perspline.functions import CORPUS_IDS, constant, corpus_function, exp_sin, from_spline, trig
from perspline.projection import function_sup_norm, sup_norm
from perspline.quasi import (MAX_TW_ORDER, QuasiCoefficients, arcsin_over_tau, delta_symbol, delta_to_stencil,
                             exact_symbol_at, stencil_symbol, tw_shift)

tau, z = sympy.symbols("tau z")


def sympy_delta(r, terms):
    ser = sympy.series((sympy.asin(tau) / tau) ** r, tau, 0, 2 * terms).removeO()
    return [sympy.Rational(ser.coeff(tau, 2 * j)) for j in range(terms)]


def sympy_stencil(r):
    d = sympy_delta(r, r)
    poly = sympy.expand(z ** r * sum(dj * ((2 - z - 1 / z) / 4) ** j for j, dj in enumerate(d)))
    return [sympy.Rational(poly.coeff(z, r + m)) for m in range(r)]


def test_delta_r2():
    assert tw_delta(2).coefficients == (1, Fraction(1, 3))
    assert tw_delta(2, terms=3).coefficients[2] == Fraction(8, 45)
    assert arcsin_over_tau(3) == [1, Fraction(1, 6), Fraction(3, 40)]


@pytest.mark.parametrize("r", [2, 3, 5, 8, 12])
def test_delta_against_sympy_series(r):
    ours = tw_delta(r, terms=r + 2).coefficients
    ref = sympy_delta(r, r + 2)
    assert [sympy.Rational(c.numerator, c.denominator) for c in ours] == ref
    assert ours[0] == 1 and all(c > 0 for c in ours)


def test_delta_range():
    with pytest.raises(InvalidOrderError):
        tw_delta(1)
    with pytest.raises(InvalidOrderError):
        tw_delta(MAX_TW_ORDER + 1)


def test_stencil_r2():
    assert thomee_wendroff(2).stencil == (Fraction(7, 6), Fraction(-1, 12))


@pytest.mark.parametrize("r", range(2, 9))
def test_stencil_against_sympy_laurent(r):
    ours = thomee_wendroff(r).stencil
    ref = sympy_stencil(r)
    assert [sympy.Rational(c.numerator, c.denominator) for c in ours] == ref


@pytest.mark.parametrize("r", range(2, MAX_TW_ORDER + 1))
def test_symbol_identities_exact(r):
    qc = thomee_wendroff(r)
    assert len(qc.stencil) == r
    assert exact_symbol_at(qc, [1] * (r - 1)) == 1
    at_pi = exact_symbol_at(qc, [(-1) ** m for m in range(1, r)])
    assert at_pi == sum(tw_delta(r).coefficients)


@pytest.mark.parametrize("r", range(2, 7))
def test_symbol_two_ways_float(r):
    xi = np.random.default_rng(r).uniform(-np.pi, np.pi, 50)
    assert np.allclose(stencil_symbol(thomee_wendroff(r), xi), delta_symbol(tw_delta(r), xi), atol=1e-13)


@pytest.mark.parametrize("r", range(2, 6))
def test_symbol_inverts_bspline_transform_to_order_2r(r):
    qc = thomee_wendroff(r)
    defect = [abs(stencil_symbol(qc, x) * cardinal_bspline_fourier(r, x) - 1) for x in (0.4, 0.2)]
    assert defect[0] / defect[1] == pytest.approx(2 ** (2 * r), rel=0.1)


def test_coefficients_validation():
    with pytest.raises(SplineError):
        QuasiCoefficients(2, (1, 2, 3))
    with pytest.raises(SplineError):
        quasi_interpolate(SplineSpace(3, 12), thomee_wendroff(2), exp_sin())


def test_delta_to_stencil_general_series():
    # a hand-made series: 2 + sin^2(xi/2) -> q0 = 5/2, q1 = -1/4
    from perspline.quasi import DeltaSeries
    qc = delta_to_stencil(DeltaSeries(2, (Fraction(2), Fraction(1))))
    assert qc.stencil == (Fraction(5, 2), Fraction(-1, 4))


@pytest.mark.parametrize("r", range(2, 9))
def test_reproduces_constants(r):
    s = quasi_interpolate(SplineSpace(r, 4 * r), thomee_wendroff(r), constant(3.0))
    assert np.allclose(spline_eval(s, np.linspace(0, 1, 501)), 3.0, atol=1e-13)


def test_rate_r2():
    u = trig("sin", 1)
    qc = thomee_wendroff(2)
    meshes = [16, 32, 64, 128]
    errors = [quasi_error(SplineSpace(2, N), qc, u) for N in meshes]
    orders = [math.log(errors[i] / errors[i + 1]) / math.log(2) for i in range(3)]
    assert np.allclose(orders, 2.0, atol=0.1)


@pytest.mark.parametrize("r", (3, 4))
def test_shifted_error_converges_at_order_r(r):
    u = exp_sin()
    qc = thomee_wendroff(r)
    errors = [quasi_error(SplineSpace(r, N), qc, u) for N in (64, 128)]
    assert math.log2(errors[0] / errors[1]) == pytest.approx(r, abs=0.2)
    assert tw_shift(SplineSpace(r, 64)) == pytest.approx((r - 2) / 128)


@pytest.mark.parametrize("name", CORPUS_IDS)
@pytest.mark.parametrize("r", (2, 3, 4, 5))
def test_sup_bound_with_explicit_constant(r, name):
    qc = thomee_wendroff(r)
    u = corpus_function(name, 2)
    for N in (4 * r, 16 * r):
        space = SplineSpace(r, N)
        assert sup_norm(quasi_interpolate(space, qc, u)) <= qc.sup_constant * function_sup_norm(u, N) + 1e-12
        rep = quasi_stability_report(space, qc, u, 0)
        assert rep.ratio_sup <= qc.sup_constant + 1e-12


def test_plateau_exp_sin_r3():
    qc = thomee_wendroff(3)
    reps = [quasi_stability_report(SplineSpace(3, N), qc, exp_sin(), 2) for N in (32, 64, 128, 256)]
    for attr in ("ratio_l2", "ratio_sup"):
        vals = [getattr(p, attr) for p in reps]
        assert max(vals) / min(vals) < 1.02


def test_spline_sampled_at_nodes_has_finite_plateau():
    qc = thomee_wendroff(3)
    base = SplineSpace(3, 16)
    u = from_spline(PeriodicSpline(base, np.cos(2 * np.pi * np.arange(16) / 16)))
    vals = [quasi_stability_report(SplineSpace(3, N), qc, u, 1).ratio_l2 for N in (64, 128, 256)]
    assert all(np.isfinite(vals))
    assert max(vals) / min(vals) < 1.05


@settings(max_examples=15, deadline=None)
@given(r=st.integers(2, 6), k=st.integers(1, 3), seed=st.integers(0, 2 ** 32 - 1))
def test_quasi_is_linear(r, k, seed):
    space = SplineSpace(r, 4 * r * k)
    qc = thomee_wendroff(r)
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal(2)
    u, v = trig("sin", 1), exp_sin()
    from perspline.functions import TestFunction
    w = TestFunction("mix", lambda l, x: a * u.d(l, x) + b * v.d(l, x))
    lhs = quasi_interpolate(space, qc, w).coeffs
    rhs = a * quasi_interpolate(space, qc, u).coeffs + b * quasi_interpolate(space, qc, v).coeffs
    assert np.allclose(lhs, rhs, atol=1e-12)
