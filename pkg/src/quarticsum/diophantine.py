"""Counting solutions of the near-equality system

    |s2(n) - s2(m)| <= t2,   |s4(n) - s4(m)| <= t4,   n, m in range^p

over ordered pairs of p-tuples, plus the Fejer-weighted version of the count.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, ParameterError
from .expsum import (
    DEFAULT_SPECTRUM_BUDGET,
    IntRange,
    PhaseSpectrum,
    as_fraction,
    build_spectrum,
    enumerate_tuples,
)

DEFAULT_BRUTE_BUDGET = 10**8


@dataclass(frozen=True)
class BoxQuery:
    """p, the tuple range and the two window half-widths (exact rationals).

    For the dyadic range (N, 2N] the thresholds correspond to t2 = d1*N^2 and
    t4 = l1*N^4.  Negative thresholds are accepted and give an empty count.
    """

    p: int
    range: IntRange
    t2: Fraction = Fraction(0)
    t4: Fraction = Fraction(0)

    def __post_init__(self):
        if not 1 <= self.p <= 5:
            raise ParameterError("p must be in 1..5")
        object.__setattr__(self, "t2", as_fraction(self.t2))
        object.__setattr__(self, "t4", as_fraction(self.t4))


@dataclass(frozen=True)
class CountResult:
    count: int
    method: str  # "bruteforce" | "spectral"
    elapsed: float


# --------------------------------------------------------------------------
# brute force


def _within(diff: np.ndarray, t: Fraction) -> np.ndarray:
    # |diff| <= num/den  <=>  den*|diff| <= num
    num, den = t.numerator, t.denominator
    a = np.abs(diff)
    if int(a.max(initial=0)) * den < 2**62 and num < 2**62:
        return a * den <= num
    return np.array([int(x) * den <= num for x in a], dtype=bool)


def count_bruteforce(q: BoxQuery, budget: int = DEFAULT_BRUTE_BUDGET) -> CountResult:
    """Enumerate all (n, m) pairs of p-tuples and test both inequalities."""
    start = time.perf_counter()
    need = q.range.length ** (2 * q.p)
    if need > budget:
        raise BudgetExceeded("brute-force pair enumeration", need, budget)
    if q.t2 < 0 or q.t4 < 0:
        return CountResult(0, "bruteforce", time.perf_counter() - start)
    s2, s4 = enumerate_tuples(q.range, q.p)
    total = 0
    for a2, a4 in zip(s2.tolist(), s4.tolist()):
        ok = _within(s2 - a2, q.t2) & _within(s4 - a4, q.t4)
        total += int(np.count_nonzero(ok))
    return CountResult(total, "bruteforce", time.perf_counter() - start)


# --------------------------------------------------------------------------
# spectral counter


class _Fenwick:
    __slots__ = ("n", "tree")

    def __init__(self, n: int):
        self.n = n
        self.tree = [0] * (n + 1)

    def add(self, i: int, v: int) -> None:
        i += 1
        tree, n = self.tree, self.n
        while i <= n:
            tree[i] += v
            i += i & -i

    def prefix(self, i: int) -> int:
        # sum of entries [0, i)
        s, tree = 0, self.tree
        while i > 0:
            s += tree[i]
            i -= i & -i
        return s


def _pairs_same_class(spec: PhaseSpectrum, t4: int) -> int:
    s2, s4, m = spec.s2, spec.s4, spec.mult
    width = int(max(s4, default=0)) + 2 * t4 + 2
    top = int(max(s2, default=0)) * width + width
    if top < 2**62 and s2.dtype != object:
        key = s2 * np.int64(width) + s4
    else:
        key = np.array([int(a) * width + int(b) for a, b in zip(s2, s4)], dtype=object)
    lo = np.searchsorted(key, key - t4, side="left")
    hi = np.searchsorted(key, key + t4, side="right")
    cum = np.concatenate(([0], np.cumsum(m)))
    window = cum[hi] - cum[lo]
    if m.dtype == object or int(window.max()) * int(m.max()) * len(m) >= 2**62:
        return sum(int(a) * int(b) for a, b in zip(m, window))
    return int(np.dot(m, window))


def _pairs_sweep(spec: PhaseSpectrum, t2: int, t4: int) -> int:
    s2 = [int(v) for v in spec.s2]
    s4 = [int(v) for v in spec.s4]
    m = [int(v) for v in spec.mult]
    levels = sorted(set(s4))
    u4 = np.array(levels, dtype=object if spec.s4.dtype == object else np.int64)
    a4 = np.asarray(spec.s4)
    rank = np.searchsorted(u4, a4).tolist()
    qlo = np.searchsorted(u4, a4 - t4, side="left").tolist()
    qhi = np.searchsorted(u4, a4 + t4, side="right").tolist()

    tree = _Fenwick(len(levels))
    size = len(s2)
    left = right = 0
    total = 0
    for i in range(size):
        upper, lower = s2[i] + t2, s2[i] - t2
        while right < size and s2[right] <= upper:
            tree.add(rank[right], m[right])
            right += 1
        while s2[left] < lower:
            tree.add(rank[left], -m[left])
            left += 1
        total += m[i] * (tree.prefix(qhi[i]) - tree.prefix(qlo[i]))
    return total


def count_from_spectrum(spec: PhaseSpectrum, t2, t4) -> int:
    """Ordered pair count for thresholds t2, t4 using a prebuilt spectrum."""
    t2, t4 = as_fraction(t2), as_fraction(t4)
    if t2 < 0 or t4 < 0:
        return 0
    # differences are integers, so |d| <= t  <=>  |d| <= floor(t)
    T2, T4 = math.floor(t2), math.floor(t4)
    if T2 == 0:
        return _pairs_same_class(spec, T4)
    return _pairs_sweep(spec, T2, T4)


def count_spectral(
    q: BoxQuery,
    budget: int = DEFAULT_SPECTRUM_BUDGET,
    spectrum: PhaseSpectrum | None = None,
) -> CountResult:
    """Exact count via a sliding s2 window over the sorted spectrum.

    A Fenwick tree over s4 ranks answers the inner |ds4| <= t4 query; when
    t2 < 1 the window collapses to one s2 class and a binary search suffices.
    """
    start = time.perf_counter()
    if spectrum is None:
        spectrum = build_spectrum(q.range, q.p, budget)
    elif spectrum.p != q.p or spectrum.range != q.range:
        raise ParameterError("spectrum does not match query")
    c = count_from_spectrum(spectrum, q.t2, q.t4)
    return CountResult(c, "spectral", time.perf_counter() - start)


# --------------------------------------------------------------------------
# Fejer kernel


def fejer_kernel(y):
    """rho(y) = (sin(pi y) / (pi y))^2 with rho(0) = 1."""
    return np.sinc(np.asarray(y, dtype=np.float64)) ** 2


def fejer_hat(t):
    """Fourier transform of rho: the triangle (1 - |t|)^+."""
    return np.maximum(0.0, 1.0 - np.abs(np.asarray(t, dtype=np.float64)))


def fejer_weighted_count(
    q: BoxQuery,
    delta: float,
    lam: float,
    budget: int = DEFAULT_SPECTRUM_BUDGET,
    spectrum: PhaseSpectrum | None = None,
) -> float:
    """Sum over tuple pairs of rho_hat(delta*ds2) * rho_hat(lam*ds4).

    Only p and the range of ``q`` are used; its thresholds play no role.
    """
    if delta < 0 or lam < 0:
        raise ParameterError("delta and lambda must be nonnegative")
    spec = spectrum if spectrum is not None else build_spectrum(q.range, q.p, budget)
    s2 = spec.s2.astype(np.float64)
    s4 = spec.s4.astype(np.float64)
    m = spec.mult.astype(np.float64)
    if delta == 0 and lam == 0:
        return float(spec.total) ** 2
    # weights vanish once |ds2| >= 1/delta
    reach2 = math.inf if delta == 0 else 1.0 / delta
    ints2 = np.asarray(spec.s2)
    lo = np.searchsorted(s2, s2 - reach2, side="right") if delta else np.zeros(len(s2), dtype=int)
    hi = np.searchsorted(s2, s2 + reach2, side="left") if delta else np.full(len(s2), len(s2))
    parts = []
    for i in range(len(s2)):
        j = slice(lo[i], hi[i])
        d2 = (ints2[j] - ints2[i]).astype(np.float64)
        d4 = (np.asarray(spec.s4[j]) - spec.s4[i]).astype(np.float64)
        w = fejer_hat(delta * d2) * fejer_hat(lam * d4)
        parts.append(m[i] * float(np.dot(m[j], w)))
    return math.fsum(parts)


# --------------------------------------------------------------------------
# product reduction for fourth powers


def lemma2_product_gap(N: int, budget: int = DEFAULT_SPECTRUM_BUDGET) -> float:
    """Largest |n1 n2 - m1 m2| / N over solutions of

        |n1^2 + n2^2 - m1^2 - m2^2| <= N,  |n1^4 + n2^4 - m1^4 - m2^4| <= N^3

    with all variables in (N, 2N].  Diagonal solutions give 0.
    """
    if N < 1:
        raise ParameterError("N must be >= 1")
    rng = IntRange.dyadic(N)
    if rng.length**2 > budget:
        raise BudgetExceeded("pair enumeration", rng.length**2, budget)
    n1, n2 = np.meshgrid(rng.values(), rng.values(), indexing="ij")
    s2 = (n1**2 + n2**2).ravel()
    s4 = (n1**4 + n2**4).ravel()
    prod = (n1 * n2).ravel()
    order = np.argsort(s2, kind="stable")
    s2, s4, prod = s2[order], s4[order], prod[order]
    lo = np.searchsorted(s2, s2 - N, side="left")
    hi = np.searchsorted(s2, s2 + N, side="right")
    t4 = N**3
    worst = 0
    for i in range(len(s2)):
        j = slice(lo[i], hi[i])
        ok = np.abs(s4[j] - s4[i]) <= t4
        if ok.any():
            worst = max(worst, int(np.abs(prod[j][ok] - prod[i]).max()))
    return worst / N
