"""Acceptance gate: one test per criterion, each with its runtime limit.

Run with ``pytest tests/test_acceptance.py``; a PASS/FAIL line per criterion
is printed in the terminal summary.
"""
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from quarticsum.diophantine import (
    BoxQuery,
    count_bruteforce,
    count_from_spectrum,
    count_spectral,
    fejer_hat,
    fejer_kernel,
    fejer_weighted_count,
)
from quarticsum.expsum import IntRange, build_spectrum
from quarticsum.moments import (
    MomentQuery,
    exponent_closed_form,
    exponent_recurrence,
    fit_exponent,
    integral_I,
    moment_exact,
    moment_quadrature,
)
from quarticsum.stationary_phase import (
    SmoothPhase,
    b_transform_residual,
    expansion_scaling,
    residual_envelope,
)
from quarticsum.weyl import (
    best_rational,
    heathbrown_bounds,
    leading_coefficient,
    near_integer_count,
    symmetric_differences,
)


class Clock:
    def __init__(self, limit: float):
        self.limit = limit

    def __enter__(self):
        self.t = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t
        if exc[0] is None:
            assert self.elapsed <= self.limit, f"took {self.elapsed:.1f}s > {self.limit}s"


def random_threshold(rnd: random.Random, top: int) -> Fraction:
    return Fraction(rnd.randint(0, top * 4), rnd.randint(1, 4))


@pytest.mark.criterion(1, "spectral count equals brute force")
def test_oracle_equivalence():
    rnd = random.Random(20240901)
    mismatches = []
    with Clock(60):
        for p in (1, 2, 3):
            for length in range(3, 9):
                lo = rnd.randint(0, 12)
                rng = IntRange(lo, lo + length)
                spec = build_spectrum(rng, p)
                top2 = p * (int(rng.hi) ** 2 - (lo + 1) ** 2)
                top4 = p * (int(rng.hi) ** 4 - (lo + 1) ** 4)
                for _ in range(20):
                    q = BoxQuery(p, rng, random_threshold(rnd, top2 // 3), random_threshold(rnd, top4 // 3))
                    a = count_spectral(q, spectrum=spec).count
                    b = count_bruteforce(q).count
                    if a != b:
                        mismatches.append((p, rng, q.t2, q.t4, a, b))
    assert not mismatches


@pytest.mark.criterion(2, "moment over the unit square equals the zero-threshold count")
def test_parseval():
    worst = 0.0
    with Clock(60):
        for p in (1, 2, 3):
            for length in (1, 4, 8, 12, 16):
                for rng in (IntRange(length, 2 * length), IntRange.closed(0, length - 1)):
                    m = moment_exact(MomentQuery(p, rng)).value
                    c = count_spectral(BoxQuery(p, rng)).count
                    worst = max(worst, abs(m - c) / c)
    assert worst <= 1e-6


@pytest.mark.criterion(3, "near-solution count grows like N^3 on [0, N]")
def test_count_slope():
    samples = []
    with Clock(180):
        for N in (16, 32, 64, 128):
            q = BoxQuery(3, IntRange.closed(0, N), 0, N**3)
            c = count_spectral(q).count
            assert c >= N**3
            samples.append((N, c))
    slope, _, _ = fit_exponent(samples)
    print(f"counts {samples} slope {slope:.4f}")
    assert 2.8 <= slope <= 3.35


@pytest.mark.criterion(4, "sixth moment over the thin window grows slowly and stays >= 1")
def test_moment_slope():
    samples = []
    with Clock(120):
        for N in (8, 16, 32, 64):
            v = integral_I(N).value
            assert v >= 1
            samples.append((N, v))
    slope, _, _ = fit_exponent(samples)
    print(f"I(N) {samples} slope {slope:.4f}")
    assert slope <= 0.5


@pytest.mark.criterion(5, "quadrature agrees with the exact moment")
def test_quadrature_consistency():
    bad = []
    with Clock(120):
        for p in (1, 2):
            for N in (4, 8, 16):
                for lam in (1.0, float(N) ** -3):
                    q = MomentQuery(p, IntRange.dyadic(N), gamma_interval=(-lam, lam))
                    e = moment_exact(q).value
                    r = moment_quadrature(q)
                    err = abs(r.value - e)
                    if err > r.error_estimate or err > 0.01 * e:
                        bad.append((p, N, lam, e, r.value, r.error_estimate))
    assert not bad


@pytest.mark.criterion(6, "B-transform residual within envelope and stable under doubling")
def test_btransform_residual():
    # envelope constant 10 frozen from calibration runs (residuals 0.29-1.22
    # against envelopes of 62-77)
    res = {}
    with Clock(30):
        for a in (0.1, 0.3):
            for N in (256, 512, 1024):
                _, _, r = b_transform_residual(SmoothPhase(a, 0.0, N))
                res[(a, N)] = r
                assert r <= residual_envelope(N, 1.5 * a, constant=10.0)
    growth = {
        (a, N): res[(a, 2 * N)] / res[(a, N)] for a in (0.1, 0.3) for N in (256, 512)
    }
    print("residuals", res)
    print("doubling ratios", growth)
    assert all(g <= 2.0 for g in growth.values()), growth


@pytest.mark.criterion(7, "expansion remainder scales cubically in gamma")
def test_expansion_scaling():
    with Clock(10):
        N, a = 200, 0.25
        gamma = a / (96 * N**2) / 4
        out = expansion_scaling(a, N, gamma, points=100)
    print(out)
    assert 1 / 16 <= out["ratio"] <= 1 / 4


@pytest.mark.criterion(8, "near-integer count obeys both explicit bounds")
def test_near_integer_bounds():
    rnd = random.Random(7)
    violations = []
    with Clock(60):
        for _ in range(1000):
            a, H, d = rnd.random(), rnd.randint(1, 10**4), rnd.uniform(0, 0.2)
            r = best_rational(a, H)
            B = near_integer_count(a, H, d)
            b1, b2 = heathbrown_bounds(r, H, d)
            if B > b1 or (b2 is not None and B > b2):
                violations.append((a, H, d, B, b1, b2))
    assert not violations


@pytest.mark.criterion(9, "quartic coefficient of iterated differences")
def test_difference_coefficient():
    rnd = random.Random(11)
    with Clock(10):
        for k in (8, 9, 10):
            for _ in range(30):
                h = [rnd.choice((-1, 1)) * rnd.randint(1, 20) for _ in range(k - 4)]
                alpha = Fraction(rnd.randint(-99, 99), rnd.randint(1, 99))
                c = symmetric_differences(k, k - 4, h, alpha)
                want = 2 ** (k - 4) * Fraction(math.factorial(k), math.factorial(4)) * math.prod(h) * alpha
                assert c[4] == want == leading_coefficient(k, k - 4, h, alpha)


@pytest.mark.criterion(10, "Fejer kernel facts")
def test_fejer_facts():
    with Clock(10):
        assert float(fejer_hat(0.0)) == 1.0
        assert float(fejer_hat(1.0)) == 0.0 and float(fejer_hat(-1.0)) == 0.0
        y = np.linspace(-0.5, 0.5, 10_000)
        # both sides equal 1 at the ends; allow a couple of ulps there
        assert np.all(np.pi**2 / 4 * fejer_kernel(y) >= 1.0 - 4e-16)
        for p, rng in ((1, IntRange(4, 8)), (2, IntRange(3, 6)), (3, IntRange(0, 7))):
            exact = count_spectral(BoxQuery(p, rng)).count
            assert fejer_weighted_count(BoxQuery(p, rng), 1.0, 1.0) == exact


@pytest.mark.criterion(11, "monotone counts and the exponent recurrence")
def test_monotone_and_recurrence():
    rnd = random.Random(3)
    with Clock(5):
        for p, rng in ((1, IntRange(0, 12)), (2, IntRange(3, 11)), (3, IntRange(0, 7))):
            spec = build_spectrum(rng, p)
            chain = sorted(Fraction(rnd.randint(0, 4000), rnd.randint(1, 3)) for _ in range(12))
            for fixed in (0, 5, 40):
                c4 = [count_from_spectrum(spec, fixed, t) for t in chain]
                c2 = [count_from_spectrum(spec, t / 50, fixed * 100) for t in chain]
                assert c4 == sorted(c4) and c2 == sorted(c2)
        assert exponent_recurrence(3.0, 4) == pytest.approx(3 / 13, abs=1e-12)
        for b in (0.0, 0.5, 1.0, 3.0, 10.0):
            for n in range(0, 50):
                assert abs(exponent_recurrence(b, n) - exponent_closed_form(b, n)) <= 1e-12
