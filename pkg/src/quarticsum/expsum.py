"""Exponential sums with phase alpha*n^2 + gamma*n^4 and their (s2, s4) spectrum.

Phases are reduced mod 1 before any trigonometric evaluation.  For integer
frequencies below 2**53 the product x*k is split exactly (Dekker) so the
fractional part is accurate to a few ulps regardless of the size of x*k;
larger frequencies fall back to exact integer arithmetic on the dyadic
rational that a float really is.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, ParameterError

TWO_PI = 2.0 * math.pi
DEFAULT_SPECTRUM_BUDGET = 50_000_000

_SPLITTER = 134217729.0  # 2**27 + 1
_EXACT_FLOAT_INT = 2**53
_INT64_SAFE = 2**62


# --------------------------------------------------------------------------
# phase reduction


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """Return (p, e) with p = fl(a*b) and p + e == a*b exactly."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _frac_small(x: float, k: np.ndarray) -> np.ndarray:
    # requires |k| < 2**53 so that k is exact as a float
    kf = k.astype(np.float64)
    p, e = two_prod(np.float64(x), kf)
    f = p - np.floor(p)
    f = f + e
    return f - np.floor(f)


def frac_mul(x: float, k) -> np.ndarray:
    """Fractional part of x*k in [0, 1) for a float x and integer array k."""
    k = np.asarray(k)
    if k.size == 0:
        return np.zeros(k.shape)
    if k.dtype != object:
        kmax = int(np.max(np.abs(k)))
        if kmax < _EXACT_FLOAT_INT:
            return _frac_small(x, k)
        if kmax < _INT64_SAFE:
            # k = k1 * 2**26 + k0; frac(x * 2**26) is exact in floating point
            k1 = k >> 26
            k0 = k - (k1 << 26)
            y = math.fmod(x * 67108864.0, 1.0)
            f = _frac_small(y, k1) + _frac_small(x, k0)
            return f - np.floor(f)
    num, den = Fraction(x).as_integer_ratio()
    out = np.empty(k.shape, dtype=np.float64)
    for idx, kk in np.ndenumerate(k):
        out[idx] = ((num * int(kk)) % den) / den
    return out


def frac_outer(xs, k) -> np.ndarray:
    """frac(xs[i] * k[j]) for a float vector xs and integers |k| < 2**53."""
    xs = np.asarray(xs, dtype=np.float64)[:, None]
    kf = np.asarray(k).astype(np.float64)[None, :]
    p, e = two_prod(xs, kf)
    f = p - np.floor(p)
    f = f + e
    return f - np.floor(f)


def unit_phase(frac) -> np.ndarray:
    """e(x) for reduced phases x."""
    return np.exp(1j * TWO_PI * np.asarray(frac, dtype=np.float64))


# --------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class IntRange:
    """Integers n with lo < n <= hi."""

    lo: int
    hi: int

    def __post_init__(self):
        if int(self.lo) != self.lo or int(self.hi) != self.hi:
            raise ParameterError("range endpoints must be integers")

    @classmethod
    def dyadic(cls, N: int) -> "IntRange":
        """The range (N, 2N]."""
        return cls(int(N), 2 * int(N))

    @classmethod
    def closed(cls, a: int, b: int) -> "IntRange":
        """The range [a, b]."""
        return cls(int(a) - 1, int(b))

    @property
    def length(self) -> int:
        return max(0, self.hi - self.lo)

    def values(self) -> np.ndarray:
        return np.arange(self.lo + 1, self.hi + 1, dtype=np.int64)

    def max_abs(self) -> int:
        return max(abs(self.lo + 1), abs(self.hi))


@dataclass(frozen=True)
class QuarticPhase:
    alpha: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.gamma)):
            raise ParameterError("phase frequencies must be finite")


@dataclass(frozen=True)
class CoefficientSequence:
    """Coefficients a_n for lo < n <= hi, each of modulus at most 1."""

    lo: int
    hi: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.ndim != 1 or len(vals) != self.hi - self.lo:
            raise ParameterError("coefficient count must equal hi - lo")
        if np.any(np.abs(vals) > 1.0 + 1e-12):
            raise ParameterError("coefficients must have modulus <= 1")
        object.__setattr__(self, "values", vals)

    @classmethod
    def ones(cls, lo: int, hi: int) -> "CoefficientSequence":
        return cls(lo, hi, np.ones(hi - lo, dtype=np.complex128))

    @property
    def range(self) -> IntRange:
        return IntRange(self.lo, self.hi)


def _terms(phase: QuarticPhase, coeffs: CoefficientSequence, upper: int) -> np.ndarray:
    n = np.arange(coeffs.lo + 1, upper + 1, dtype=np.int64)
    if len(n) and max(abs(int(n[0])), abs(int(n[-1]))) ** 4 >= _INT64_SAFE:
        n = np.array([int(v) for v in n], dtype=object)
    f = frac_mul(phase.alpha, n * n) + frac_mul(phase.gamma, n**4)
    return coeffs.values[: upper - coeffs.lo] * unit_phase(f - np.floor(f))


def eval_sum(phase: QuarticPhase, coeffs: CoefficientSequence, upper: int | None = None) -> complex:
    """Sum of a_n e(alpha n^2 + gamma n^4) over lo < n <= upper."""
    if upper is None:
        upper = coeffs.hi
    if not (coeffs.lo < upper <= coeffs.hi):
        raise ParameterError(f"upper={upper} outside ({coeffs.lo}, {coeffs.hi}]")
    t = _terms(phase, coeffs, upper)
    return complex(math.fsum(t.real), math.fsum(t.imag))


def max_partial_sum(phase: QuarticPhase, coeffs: CoefficientSequence) -> tuple[complex, int]:
    """Partial sum of largest modulus and its upper limit N1.

    On ties the smallest N1 wins.
    """
    if coeffs.hi <= coeffs.lo:
        raise ParameterError("empty coefficient sequence")
    partial = np.cumsum(_terms(phase, coeffs, coeffs.hi))
    i = int(np.argmax(np.abs(partial)))
    return complex(partial[i]), coeffs.lo + 1 + i


# --------------------------------------------------------------------------
# phase spectrum


@dataclass(frozen=True)
class PhaseSpectrum:
    """Multiplicities of (s2, s4) = (sum n_i^2, sum n_i^4) over p-tuples.

    Arrays are sorted lexicographically by (s2, s4); dtype is int64 when the
    largest s4 fits, otherwise object (Python integers).
    """

    p: int
    range: IntRange
    s2: np.ndarray = field(repr=False)
    s4: np.ndarray = field(repr=False)
    mult: np.ndarray = field(repr=False)

    @property
    def entries(self) -> dict[tuple[int, int], int]:
        return {(int(a), int(b)): int(m) for a, b, m in zip(self.s2, self.s4, self.mult)}

    @property
    def total(self) -> int:
        return int(sum(int(m) for m in self.mult)) if self.mult.dtype == object else int(self.mult.sum())

    def __len__(self) -> int:
        return len(self.s2)

    def class_bounds(self) -> np.ndarray:
        """Start offsets of the s2 classes plus a final sentinel."""
        if len(self.s2) == 0:
            return np.array([0])
        change = np.flatnonzero(self.s2[1:] != self.s2[:-1]) + 1
        return np.concatenate(([0], change, [len(self.s2)]))


def _aggregate(s2, s4, mult):
    if s2.dtype == object:
        acc: dict[tuple[int, int], int] = {}
        for a, b, m in zip(s2, s4, mult):
            acc[(a, b)] = acc.get((a, b), 0) + int(m)
        keys = sorted(acc)
        return (
            np.array([k[0] for k in keys], dtype=object),
            np.array([k[1] for k in keys], dtype=object),
            np.array([acc[k] for k in keys], dtype=object),
        )
    order = np.lexsort((s4, s2))
    s2, s4, mult = s2[order], s4[order], mult[order]
    if len(s2) == 0:
        return s2, s4, mult
    start = np.concatenate(([True], (s2[1:] != s2[:-1]) | (s4[1:] != s4[:-1])))
    idx = np.flatnonzero(start)
    return s2[idx], s4[idx], np.add.reduceat(mult, idx)


def spectrum_size_bound(rng: IntRange, p: int) -> int:
    return rng.length**p


def build_spectrum(rng: IntRange, p: int, budget: int = DEFAULT_SPECTRUM_BUDGET) -> PhaseSpectrum:
    """Exact (s2, s4) multiplicity table over all p-tuples from ``rng``.

    Built by p-fold convolution of the single-variable table.
    """
    if not 1 <= p <= 5:
        raise ParameterError("p must be in 1..5")
    if rng.length < 1:
        raise ParameterError("range must be nonempty")
    need = spectrum_size_bound(rng, p)
    if need > budget:
        raise BudgetExceeded("phase spectrum enumeration", need, budget)

    big = p * rng.max_abs() ** 4 >= _INT64_SAFE
    dtype = object if big else np.int64
    n = rng.values()
    if big:
        n = np.array([int(v) for v in n], dtype=object)
    b2, b4 = n * n, n**4
    b2, b4, bm = _aggregate(b2.astype(dtype), b4.astype(dtype), np.ones(len(n), dtype=dtype))
    s2, s4, m = b2, b4, bm
    for _ in range(p - 1):
        s2, s4, m = _aggregate(
            (s2[:, None] + b2[None, :]).ravel(),
            (s4[:, None] + b4[None, :]).ravel(),
            (m[:, None] * bm[None, :]).ravel(),
        )
    return PhaseSpectrum(p, rng, s2, s4, m)


def enumerate_tuples(rng: IntRange, p: int) -> tuple[np.ndarray, np.ndarray]:
    """s2 and s4 of every p-tuple, one entry per tuple (no aggregation)."""
    grids = np.meshgrid(*([rng.values()] * p), indexing="ij")
    s2 = sum(g.astype(np.int64) ** 2 for g in grids).ravel()
    s4 = sum(g.astype(np.int64) ** 4 for g in grids).ravel()
    return s2, s4


def ones_like_range(rng: IntRange) -> CoefficientSequence:
    return CoefficientSequence.ones(rng.lo, rng.hi)


def as_fraction(x) -> Fraction:
    """Parse ints, floats, Fractions and "num/den" strings exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


def sequence_from(values: Sequence[complex], lo: int) -> CoefficientSequence:
    return CoefficientSequence(lo, lo + len(values), np.asarray(values, dtype=np.complex128))
