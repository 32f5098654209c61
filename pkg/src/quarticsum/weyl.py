"""Weyl sums of k-th powers and the quantities used to bound them.

Every float is a dyadic rational, so phases alpha * n^k mod 1 are computed
exactly from the integer pair behind the float (or behind a Fraction), using
modular exponentiation.  The only loss of accuracy is the final conversion of
the reduced phase to a double.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ParameterError, PrecisionWarning
from .expsum import TWO_PI, as_fraction, frac_mul

LOOP_LIMIT = 100_000
# turns of phase error tolerated from the float's own rounding before warning
PHASE_TOLERANCE = 1e-6


def _exact(alpha) -> Fraction:
    if isinstance(alpha, str):
        return Fraction(alpha.strip())
    return as_fraction(alpha)


@dataclass(frozen=True)
class WeylQuery:
    k: int
    N: int
    alpha: float | Fraction

    def __post_init__(self):
        if self.k < 2:
            raise ParameterError("k must be >= 2")
        if self.N < 1:
            raise ParameterError("N must be >= 1")


@dataclass(frozen=True)
class RationalApprox:
    a: int
    q: int
    theta: float

    @property
    def value(self) -> Fraction:
        return Fraction(self.a, self.q)


@dataclass(frozen=True)
class SievePairs:
    a_values: Sequence[float]
    b_values: Sequence[float]
    N: int

    def __post_init__(self):
        if len(self.a_values) != len(self.b_values) or len(self.a_values) < 1:
            raise ParameterError("a and b need equal, nonzero length")


# --------------------------------------------------------------------------
# sums


def weyl_sum(q: WeylQuery) -> complex:
    """S_k(alpha) = sum_{n=1}^N e(alpha n^k), compensated."""
    x = _exact(q.alpha)
    num, den = x.numerator, x.denominator
    if isinstance(q.alpha, float) and q.alpha != 0:
        ulp = math.ulp(q.alpha)
        if ulp * q.N**q.k > PHASE_TOLERANCE:
            warnings.warn(
                f"float alpha carries {ulp:.2e} rounding; phases n^k alpha are only "
                f"meaningful for the float itself, not the real it approximates",
                PrecisionWarning,
                stacklevel=2,
            )
    ph = np.fromiter(
        ((num * pow(n, q.k, den)) % den / den for n in range(1, q.N + 1)),
        dtype=np.float64,
        count=q.N,
    )
    re = np.cos(TWO_PI * ph)
    im = np.sin(TWO_PI * ph)
    return complex(math.fsum(re), math.fsum(im))


# --------------------------------------------------------------------------
# near-integer counts


def floor_sum(n: int, m: int, a: int, b: int) -> int:
    """Sum of floor((a i + b) / m) for 0 <= i < n, any integers a, b; m > 0."""
    if n <= 0:
        return 0
    total = 0
    qa, a = divmod(a, m)
    qb, b = divmod(b, m)
    total += qa * n * (n - 1) // 2 + qb * n
    while True:
        if a >= m:
            total += (n - 1) * n // 2 * (a // m)
            a %= m
        if b >= m:
            total += n * (b // m)
            b %= m
        y_max = a * n + b
        if y_max < m:
            break
        n, b = divmod(y_max, m)
        m, a = a, m
    return total


def _count_floor_sum(x: Fraction, H: int, d: Fraction) -> int:
    # ||h x|| <= d  <=>  floor(h x + d) + floor(d - h x) + 1 == 1   (d < 1/2)
    c = x.denominator * d.denominator
    a = x.numerator * d.denominator
    b = d.numerator * x.denominator
    up = floor_sum(H, c, a, a + b)
    down = floor_sum(H, c, -a, b - a)
    return up + down + H


def _count_loop(x: Fraction, H: int, d: Fraction) -> int:
    num, den = x.numerator, x.denominator
    dn, dd = d.numerator, d.denominator
    count = 0
    for h in range(1, H + 1):
        r = (num * h) % den
        if min(r, den - r) * dd <= dn * den:
            count += 1
    return count


def near_integer_count(alpha, H: int, delta, method: str = "auto") -> int:
    """#{1 <= h <= H : ||alpha h|| <= delta}, exact for float or rational input.

    ``method="loop"`` scans every h; ``"floor_sum"`` uses the identity above
    with a Euclid-like floor-sum in O(log) steps.  ``"auto"`` loops for
    H <= 100000.
    """
    if H < 1:
        raise ParameterError("H must be >= 1")
    x, d = _exact(alpha), _exact(delta)
    if d < 0:
        raise ParameterError("delta must be nonnegative")
    if d >= Fraction(1, 2):
        return H
    if method == "auto":
        method = "loop" if H <= LOOP_LIMIT else "floor_sum"
    if method == "loop":
        return _count_loop(x, H, d)
    if method == "floor_sum":
        return _count_floor_sum(x, H, d)
    raise ParameterError(f"unknown method {method!r}")


# --------------------------------------------------------------------------
# rational approximation


def convergents(alpha) -> list[tuple[int, int]]:
    """All continued-fraction convergents (a, q) of the exact value of alpha."""
    x = _exact(alpha)
    out = []
    p0, q0, p1, q1 = 0, 1, 1, 0
    while True:
        t = math.floor(x)
        p0, q0, p1, q1 = p1, q1, t * p1 + p0, t * q1 + q0
        out.append((p1, q1))
        frac = x - t
        if frac == 0:
            return out
        x = 1 / frac


def best_rational(alpha, Q: int) -> RationalApprox:
    """Convergent a/q of alpha with the largest q <= Q; |theta| <= 1/q^2."""
    if Q < 1:
        raise ParameterError("Q must be >= 1")
    x = _exact(alpha)
    best = None
    for a, q in convergents(x):
        if q > Q:
            break
        best = (a, q)
    a, q = best
    return RationalApprox(a, q, float(x - Fraction(a, q)))


def heathbrown_bounds(r: RationalApprox, H: int, delta: float) -> tuple[float, float | None]:
    """The two explicit upper bounds on #{h <= H : ||alpha h|| <= delta}."""
    q, th = r.q, abs(r.theta)
    b1 = 4 * (1 + q * delta) * (1 + H / q)
    if th == 0:
        return b1, None
    return b1, 8 * (1 + delta / (q * th)) * (1 + q * th * H)


# --------------------------------------------------------------------------
# differencing


def _poly_shift_difference(coeffs: list[Fraction], h: int) -> list[Fraction]:
    # P(n + h) - P(n - h) in the monomial basis
    deg = len(coeffs) - 1
    out = [Fraction(0)] * (deg + 1)
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        for j in range(i + 1):
            # odd powers of h survive, even ones cancel
            if (i - j) % 2 == 1:
                out[j] += 2 * c * math.comb(i, j) * h ** (i - j)
    # the top coefficient always cancels; keep the fixed length so the
    # degree stays deg - 1 even when alpha = 0
    return out[:-1]


def symmetric_differences(k: int, r: int, h: Sequence[int], alpha) -> list[Fraction]:
    """Coefficients (constant term first) of D_{h_1} ... D_{h_r} (alpha n^k),

    where D_h f(n) = f(n + h) - f(n - h).  The result has degree k - r.
    """
    if not 1 <= r < k:
        raise ParameterError("need 1 <= r < k")
    if len(h) != r or any(v == 0 for v in h):
        raise ParameterError("need r nonzero shifts")
    a = _exact(alpha)
    coeffs = [Fraction(0)] * k + [a]
    for step in h:
        coeffs = _poly_shift_difference(coeffs, int(step))
    return coeffs


def leading_coefficient(k: int, r: int, h: Sequence[int], alpha) -> Fraction:
    """2^r k!/(k-r)! h_1 ... h_r alpha."""
    return 2**r * Fraction(math.factorial(k), math.factorial(k - r)) * math.prod(h) * _exact(alpha)


# --------------------------------------------------------------------------
# the k >= 8 bound


@dataclass
class Theorem4Report:
    k: int
    N: int
    alpha: str
    epsilon: float
    K: int
    H: int
    delta: Fraction
    B: int
    lhs: float
    rhs: float
    ratio: float
    exponent_main: float
    exponent_secondary: float
    approx: RationalApprox
    q_window: bool
    theta_window: bool
    probabilistic_shape: float
    precision_warning: bool = False
    extra: dict = field(default_factory=dict)

    def as_row(self) -> dict:
        return {
            "k": self.k,
            "N": self.N,
            "alpha": self.alpha,
            "epsilon": self.epsilon,
            "K": self.K,
            "H": self.H,
            "delta": str(self.delta),
            "B": self.B,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "exponent_main": self.exponent_main,
            "exponent_secondary": self.exponent_secondary,
            "a": self.approx.a,
            "q": self.approx.q,
            "theta": self.approx.theta,
            "q_window": self.q_window,
            "theta_window": self.theta_window,
            "probabilistic_shape": self.probabilistic_shape,
            "precision_warning": self.precision_warning,
        }


def theorem4_parameters(k: int, N: int) -> tuple[int, Fraction, int]:
    """H = 16 k!/4! N^(k-4), delta = N^-4, K = 2^k."""
    H = 16 * math.factorial(k) // math.factorial(4) * N ** (k - 4)
    return H, Fraction(1, N**4), 2**k


def theorem4_report(k: int, N: int, alpha, epsilon: float = 0.01) -> Theorem4Report:
    """Evaluate both sides of the k >= 8 Weyl bound (implied constant taken as 1).

    rhs = N^(1 - 16/K) + N^(1 - 3/K + eps) (B / (H N^-4))^(8 / (5K)).
    """
    if k < 8:
        raise ParameterError("the bound needs k >= 8")
    if N < 2:
        raise ParameterError("N must be >= 2")
    H, delta, K = theorem4_parameters(k, N)
    x = _exact(alpha)
    B = near_integer_count(x, H, delta)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", PrecisionWarning)
        S = weyl_sum(WeylQuery(k, N, alpha))
    lhs = abs(S)
    e_main, e_sec = 1 - 16 / K, 1 - 3 / K
    weight = B / (H * float(delta))
    rhs = N**e_main + N ** (e_sec + epsilon) * weight ** (8 / (5 * K))
    approx = best_rational(x, N ** (k - 4))
    q_window = N**4 <= approx.q <= N ** (k - 4)
    tq = abs(approx.theta) * approx.q
    theta_window = N ** -(k - 4) <= tq <= N**-4
    shape = H ** (1 + epsilon) * float(delta) + H**epsilon
    return Theorem4Report(
        k=k,
        N=N,
        alpha=str(alpha),
        epsilon=epsilon,
        K=K,
        H=H,
        delta=delta,
        B=B,
        lhs=lhs,
        rhs=rhs,
        ratio=lhs / rhs,
        exponent_main=e_main,
        exponent_secondary=e_sec,
        approx=approx,
        q_window=q_window,
        theta_window=theta_window,
        probabilistic_shape=shape,
        precision_warning=any(issubclass(w.category, PrecisionWarning) for w in caught),
    )


# --------------------------------------------------------------------------
# double large sieve quantities


def _dist_to_int(x: np.ndarray) -> np.ndarray:
    return np.abs(x - np.round(x))


def sieve_pair_count(s: SievePairs) -> int:
    """#{(h1, h2) : ||a_h1 - a_h2|| <= N^-4 and ||b_h1 - b_h2|| <= N^-2}."""
    a = np.asarray(s.a_values, dtype=np.float64)
    b = np.asarray(s.b_values, dtype=np.float64)
    ta, tb = float(s.N) ** -4, float(s.N) ** -2
    total = 0
    for i in range(len(a)):
        ok = (_dist_to_int(a - a[i]) <= ta) & (_dist_to_int(b - b[i]) <= tb)
        total += int(np.count_nonzero(ok))
    return total


def sieve_lhs(s: SievePairs, lengths: Sequence[int] | None = None) -> float:
    """Sum over h of |sum_{n <= N_h} e(a_h n^4 + b_h n^2)|."""
    out = []
    for i, (a, b) in enumerate(zip(s.a_values, s.b_values)):
        nh = s.N if lengths is None else lengths[i]
        n = np.arange(1, nh + 1, dtype=np.int64)
        f = frac_mul(float(a), n**4) + frac_mul(float(b), n * n)
        t = np.exp(1j * TWO_PI * (f - np.floor(f)))
        out.append(abs(complex(math.fsum(t.real), math.fsum(t.imag))))
    return math.fsum(out)
