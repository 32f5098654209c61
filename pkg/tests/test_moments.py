import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from quarticsum import errors
from quarticsum.diophantine import BoxQuery, count_spectral
from quarticsum.expsum import CoefficientSequence, IntRange
from quarticsum.moments import (
    MomentQuery,
    exponent_closed_form,
    exponent_recurrence,
    fit_exponent,
    gamma_kernel,
    integral_I,
    integral_R,
    moment_exact,
    moment_quadrature,
    small_alpha_moment,
)


# ---- gamma kernel


def test_kernel_zero_frequency():
    assert gamma_kernel(0, 0.7, 0) == pytest.approx(0.7, abs=1e-15)


def test_kernel_full_period_is_zero():
    assert gamma_kernel(0, 1, 5) == 0


def test_kernel_half_period():
    assert abs(gamma_kernel(0, 0.5, 1) - 1j / math.pi) < 1e-15


def test_kernel_reversed_interval():
    with pytest.raises(errors.ParameterError):
        gamma_kernel(1, 0, 3)


@settings(max_examples=40, deadline=None)
@given(st.floats(-1, 1), st.floats(0, 1), st.integers(-50, 50))
def test_kernel_matches_numerical_integral(l0, width, d):
    l1 = l0 + width
    re, _ = integrate.quad(lambda g: math.cos(2 * math.pi * g * d), l0, l1, limit=200)
    im, _ = integrate.quad(lambda g: math.sin(2 * math.pi * g * d), l0, l1, limit=200)
    assert abs(gamma_kernel(l0, l1, d) - complex(re, im)) < 1e-10


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-2, 2), min_size=3, max_size=3).map(sorted),
    st.integers(-(10**6), 10**6),
)
def test_kernel_additivity(ls, d):
    a, b, c = ls
    assert abs(gamma_kernel(a, b, d) + gamma_kernel(b, c, d) - gamma_kernel(a, c, d)) <= 1e-12


# ---- exact route


@pytest.mark.parametrize("N", [2, 4, 8])
def test_linear_moment_is_diagonal(N):
    assert moment_exact(MomentQuery(1, IntRange.dyadic(N))).value == pytest.approx(N, rel=1e-12)


def test_pairs_moment():
    assert moment_exact(MomentQuery(2, IntRange(3, 6))).value == pytest.approx(15, rel=1e-12)


@pytest.mark.parametrize("p", [1, 2, 3])
@pytest.mark.parametrize("length", [3, 9, 16])
def test_parseval(p, length):
    rng = IntRange(length, 2 * length)
    m = moment_exact(MomentQuery(p, rng)).value
    c = count_spectral(BoxQuery(p, rng)).count
    assert abs(m - c) <= 1e-6 * c


def test_exact_rejects_partial_alpha():
    with pytest.raises(errors.ParameterError):
        moment_exact(MomentQuery(1, IntRange(0, 4), (0.0, 0.5)))


def test_exact_rejects_weighted_coefficients():
    c = CoefficientSequence(0, 3, np.array([1, 0.5, 1]))
    with pytest.raises(errors.ParameterError):
        moment_exact(MomentQuery(1, IntRange(0, 3), coeffs=c))


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 3), st.integers(2, 8), st.floats(1e-6, 0.5), st.floats(0, 0.5))
def test_moment_monotone_in_gamma_window(p, N, w1, extra):
    rng = IntRange.dyadic(N)
    small = moment_exact(MomentQuery(p, rng, gamma_interval=(-w1, w1))).value
    large = moment_exact(MomentQuery(p, rng, gamma_interval=(-w1 - extra, w1 + extra))).value
    assert 0 <= small <= large * (1 + 1e-12) + 1e-12


# ---- quadrature route


def test_quadrature_zero_coefficients():
    c = CoefficientSequence(0, 4, np.zeros(4))
    assert moment_quadrature(MomentQuery(1, IntRange(0, 4), coeffs=c)).value == 0


def test_quadrature_degenerate_gamma():
    assert moment_quadrature(MomentQuery(2, IntRange(0, 4), gamma_interval=(0.3, 0.3))).value == 0


def test_quadrature_unit_square_linear():
    r = moment_quadrature(MomentQuery(1, IntRange(4, 8)))
    assert abs(r.value - 4) <= max(r.error_estimate, 1e-9)


def test_quadrature_grid_budget():
    with pytest.raises(errors.BudgetExceeded):
        moment_quadrature(MomentQuery(2, IntRange.dyadic(16)), grid_budget=1000)


def test_quadrature_matches_exact_on_cubic_window():
    # p = 3, range (8, 16], gamma over [-8^-3, 8^-3]
    lam = 8.0**-3
    q = MomentQuery(3, IntRange.dyadic(8), gamma_interval=(-lam, lam))
    e = moment_exact(q).value
    r = moment_quadrature(q)
    assert abs(r.value - e) <= r.error_estimate


@pytest.mark.parametrize("N", [3, 5])
def test_quadrature_weighted_coefficients_against_direct_grid(N):
    # random unimodular weights; reference is a dense trapezoid-free midpoint
    # sum written independently of the library
    rng = np.random.default_rng(N)
    vals = np.exp(2j * np.pi * rng.random(N))
    c = CoefficientSequence(N, 2 * N, vals)
    q = MomentQuery(1, IntRange.dyadic(N), (0.1, 0.4), (0.0, 0.02), coeffs=c)
    r = moment_quadrature(q)
    n = np.arange(N + 1, 2 * N + 1)
    a = 0.1 + (np.arange(3000) + 0.5) * 0.3 / 3000
    g = 0.0 + (np.arange(600) + 0.5) * 0.02 / 600
    ph = a[:, None, None] * n**2 + g[None, :, None] * n**4
    s = np.abs((vals * np.exp(2j * np.pi * ph)).sum(axis=2)) ** 2
    ref = s.mean() * 0.3 * 0.02
    assert abs(r.value - ref) <= max(10 * r.error_estimate, 1e-6 * ref)


# ---- specialisations


# frozen from exact orthogonality runs
I_FROZEN = {8: 9.900232339275735, 16: 10.904277544022287, 32: 11.55730307591023}


@pytest.mark.parametrize("N", sorted(I_FROZEN))
def test_integral_I_values(N):
    v = integral_I(N).value
    assert v == pytest.approx(I_FROZEN[N], rel=1e-10)
    assert v >= 1


def test_integral_I_against_quadrature():
    lam = 8.0**-3
    r = moment_quadrature(MomentQuery(3, IntRange.dyadic(8), gamma_interval=(-lam, lam)))
    assert abs(integral_I(8).value - r.value) <= r.error_estimate


def test_integral_I_noninteger_N():
    assert integral_I(2.5).value > 0


def test_integral_R_small_case():
    r = integral_R(0.25, 16)
    assert r.value >= 0
    assert math.isfinite(r.ratio) and r.ratio > 0
    assert r.value <= integral_I(16).value * (1 + 1e-9)


def test_integral_R_domain():
    with pytest.raises(errors.ParameterError):
        integral_R(0.01, 16)
    with pytest.raises(errors.ParameterError):
        integral_R(0.3, 16)


def test_quarter_windows_recombine_to_I():
    # [0, 1/4] and its mirror under alpha -> 1 - alpha cover half the period
    N, lam = 8, 8.0**-3
    quarters = [(0.0, 0.25), (0.25, 0.5)]
    total = 0.0
    for a in quarters:
        total += moment_quadrature(MomentQuery(3, IntRange.dyadic(N), a, (-lam, lam))).value
    assert total * 2 == pytest.approx(integral_I(N).value, rel=1e-6)


@pytest.mark.parametrize("N", [16, 24])
def test_small_alpha_region_log_bound(N):
    r = small_alpha_moment(N)
    assert r.value <= 100 * math.log(N) ** 6


# ---- exponents


def test_recurrence_examples():
    assert exponent_recurrence(3.0, 1) == 0.75
    assert exponent_recurrence(3.0, 4) == pytest.approx(3 / 13, abs=1e-15)
    assert exponent_recurrence(0.0, 7) == 0.0


@given(st.floats(0, 100), st.integers(0, 200))
def test_recurrence_closed_form(b, n):
    assert abs(exponent_recurrence(b, n) - exponent_closed_form(b, n)) <= 1e-12


def test_fit_cubic():
    s, _, res = fit_exponent([(N, float(N) ** 3) for N in (16, 32, 64, 128)])
    assert abs(s - 3.0) < 1e-12 and res < 1e-12


def test_fit_constant():
    s, _, _ = fit_exponent([(N, 7.0) for N in (2, 4, 8)])
    assert abs(s) < 1e-12


def test_fit_needs_two_points():
    with pytest.raises(errors.ParameterError):
        fit_exponent([(2, 3.0)])
