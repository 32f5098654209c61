"""Mean values of |S(alpha, gamma)|^(2p) over rectangles in (alpha, gamma).

Two routes:

* ``moment_exact`` integrates alpha over a full period by orthogonality, so
  only tuple pairs with equal s2 survive; the gamma integral is then a closed
  form in ds4.  Exact up to floating evaluation of that closed form.
* ``moment_quadrature`` is a tensor midpoint rule on an explicit grid and
  never touches the spectrum.  It is the independent check of the first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, ParameterError
from .expsum import (
    DEFAULT_SPECTRUM_BUDGET,
    TWO_PI,
    CoefficientSequence,
    IntRange,
    build_spectrum,
    frac_mul,
    frac_outer,
)

DEFAULT_GRID_BUDGET = 4_000_000_000
DEFAULT_SAFETY = 1.0
_CHUNK_ELEMS = 1 << 22


@dataclass(frozen=True)
class MomentQuery:
    p: int
    range: IntRange
    alpha_interval: tuple[float, float] = (0.0, 1.0)
    gamma_interval: tuple[float, float] = (0.0, 1.0)
    coeffs: CoefficientSequence | None = None

    def __post_init__(self):
        if not 1 <= self.p <= 5:
            raise ParameterError("p must be in 1..5")
        a0, a1 = self.alpha_interval
        g0, g1 = self.gamma_interval
        if not (0.0 <= a0 <= a1 <= 1.0):
            raise ParameterError("alpha interval must lie inside [0, 1]")
        if g1 < g0:
            raise ParameterError("gamma interval is reversed")
        if self.coeffs is not None and self.coeffs.range != self.range:
            raise ParameterError("coefficients do not cover the range")

    def coefficient_values(self) -> np.ndarray:
        if self.coeffs is None:
            return np.ones(self.range.length, dtype=np.complex128)
        return self.coeffs.values


@dataclass(frozen=True)
class MomentResult:
    value: float
    method: str  # "exact_orthogonality" | "quadrature"
    error_estimate: float


# --------------------------------------------------------------------------
# exact route


def gamma_kernel(lambda0: float, lambda1: float, d: int) -> complex:
    """Integral of e(gamma d) for gamma in [lambda0, lambda1]."""
    if lambda1 < lambda0:
        raise ParameterError("lambda0 must not exceed lambda1")
    return complex(_gamma_kernel_array(lambda0, lambda1, np.array([d]))[0])


def _gamma_kernel_array(lambda0: float, lambda1: float, d: np.ndarray) -> np.ndarray:
    # e(c d) * sin(2 pi w d) / (pi d) with c the midpoint and w the half width;
    # avoids the cancellation in e(l1 d) - e(l0 d) for short windows
    c = 0.5 * (lambda0 + lambda1)
    w = 0.5 * (lambda1 - lambda0)
    d = np.asarray(d)
    out = np.empty(d.shape, dtype=np.complex128)
    zero = d == 0
    out[zero] = 2.0 * w
    nz = ~zero
    if np.any(nz):
        dn = d[nz]
        rot = np.exp(1j * TWO_PI * frac_mul(c, dn))
        fw = frac_mul(w, dn)
        s = np.sin(TWO_PI * fw)
        s[(fw == 0.0) | (fw == 0.5)] = 0.0  # whole half-periods integrate to zero
        amp = s / (math.pi * dn.astype(np.float64))
        out[nz] = rot * amp
    return out


def _is_full_alpha_period(q: MomentQuery) -> bool:
    return tuple(q.alpha_interval) == (0.0, 1.0)


def moment_exact(q: MomentQuery, budget: int = DEFAULT_SPECTRUM_BUDGET) -> MomentResult:
    """Exact evaluation for alpha over [0, 1] and unit coefficients.

    The returned ``error_estimate`` is the imaginary residue of the complex
    accumulation, which is zero in exact arithmetic.
    """
    if not _is_full_alpha_period(q):
        raise ParameterError("exact route needs alpha over the full period [0, 1]")
    if q.coeffs is not None and not np.all(q.coeffs.values == 1):
        raise ParameterError("exact route needs unit coefficients")
    g0, g1 = q.gamma_interval
    spec = build_spectrum(q.range, q.p, budget)
    bounds = spec.class_bounds()
    sizes = np.diff(bounds)
    cls = np.repeat(np.arange(len(sizes)), sizes)
    m = spec.mult.astype(np.float64)
    s4 = spec.s4

    re_parts, im_parts = [], []
    diag = _gamma_kernel_array(g0, g1, np.zeros(1, dtype=np.int64))[0]
    re_parts.append(float(np.dot(m, m)) * diag.real)
    im_parts.append(float(np.dot(m, m)) * diag.imag)
    for k in range(1, int(sizes.max())):
        same = np.flatnonzero(cls[:-k] == cls[k:])
        if len(same) == 0:
            continue
        j = same + k
        d = s4[j] - s4[same]
        w = m[same] * m[j]
        kv = _gamma_kernel_array(g0, g1, d) + _gamma_kernel_array(g0, g1, -d)
        re_parts.append(float(np.dot(w, kv.real)))
        im_parts.append(float(np.dot(w, kv.imag)))
    value = math.fsum(re_parts)
    residue = abs(math.fsum(im_parts))
    return MomentResult(value, "exact_orthogonality", residue)


# --------------------------------------------------------------------------
# quadrature route


def _max_frequency(rng: IntRange, power: int, p: int) -> int:
    v = rng.values().astype(object) ** power
    return p * int(max(v) - min(v))


def _nodes(a: float, b: float, freq: int, safety: float) -> tuple[int, bool]:
    """Node count for one axis and whether the axis spans whole periods.

    A whole-period axis is integrated over a single period only; the caller
    scales by the number of periods.
    """
    length = b - a
    if length <= 0:
        return 0, False
    if float(length).is_integer():
        # midpoint rule with more nodes per period than the top frequency is
        # exact for trigonometric polynomials, whatever the offset
        return freq + 1, True
    m = max(2, math.ceil(length * TWO_PI * freq / safety))
    return m + (m % 2), False


def _midpoints(a: float, b: float, m: int) -> np.ndarray:
    h = (b - a) / m
    return a + (np.arange(m) + 0.5) * h


def _grid_sum(coeffs, n, alphas, gammas, p) -> float:
    """Sum over the grid of |sum_n a_n e(alpha n^2 + gamma n^4)|^(2p)."""
    if len(alphas) == 0 or len(gammas) == 0:
        return 0.0
    A = coeffs[None, :] * np.exp(1j * TWO_PI * frac_outer(alphas, n * n))
    chunk = max(1, _CHUNK_ELEMS // max(1, len(alphas)))
    n4 = n**4
    parts = []
    for s in range(0, len(gammas), chunk):
        G = np.exp(1j * TWO_PI * frac_outer(gammas[s : s + chunk], n4)).T
        S = A @ G
        w = S.real * S.real + S.imag * S.imag
        parts.append(float(np.sum(w**p)))
    return math.fsum(parts)


def _reflected_sum(coeffs, n, ma, mg, p) -> float:
    # unit-square midpoint grid; for real a_n, |S(1 - x, 1 - y)| = |S(x, y)|
    # and the grid is closed under that reflection, so half the rows suffice
    alphas = _midpoints(0.0, 1.0, ma)
    gammas = _midpoints(0.0, 1.0, mg)
    half = ma // 2
    total = 2.0 * _grid_sum(coeffs, n, alphas[:half], gammas, p)
    if ma % 2:
        total += _grid_sum(coeffs, n, alphas[half : half + 1], gammas, p)
    return total


def _evaluated_nodes(ma: int, mg: int, per_a: bool, per_g: bool, real: bool) -> int:
    if per_a and per_g and real:
        return (ma + 1) // 2 * mg
    return ma * mg


def quadrature_grid(q: MomentQuery, safety: float = DEFAULT_SAFETY) -> tuple[int, int]:
    """Fine-grid node counts (alpha, gamma) that ``moment_quadrature`` would use."""
    ma, _ = _nodes(*q.alpha_interval, _max_frequency(q.range, 2, q.p), safety)
    mg, _ = _nodes(*q.gamma_interval, _max_frequency(q.range, 4, q.p), safety)
    return ma, mg


def moment_quadrature(
    q: MomentQuery,
    safety: float = DEFAULT_SAFETY,
    grid_budget: int = DEFAULT_GRID_BUDGET,
) -> MomentResult:
    """Tensor midpoint rule with an error estimate from one step halving.

    On axes that span whole periods the node count exceeds the largest
    frequency of |S|^(2p), which makes the rule exact there; those axes are
    integrated over one period and not coarsened.  On partial windows the
    step obeys h <= safety / (2 pi F), F the largest frequency on that axis,
    and the estimate is |Q(h) - Q(2h)| / 3.
    """
    if safety <= 0:
        raise ParameterError("safety must be positive")
    a0, a1 = q.alpha_interval
    g0, g1 = q.gamma_interval
    fa = _max_frequency(q.range, 2, q.p)
    fg = _max_frequency(q.range, 4, q.p)
    ma, per_a = _nodes(a0, a1, fa, safety)
    mg, per_g = _nodes(g0, g1, fg, safety)
    coeffs = q.coefficient_values()
    real = bool(np.all(coeffs.imag == 0))
    coarse_a = ma if per_a else ma // 2
    coarse_g = mg if per_g else mg // 2
    need = _evaluated_nodes(ma, mg, per_a, per_g, real)
    if not (per_a and per_g):
        need += coarse_a * coarse_g
    if need > grid_budget:
        raise BudgetExceeded(f"quadrature grid {ma} x {mg}", need, grid_budget)
    if ma == 0 or mg == 0 or not np.any(coeffs):
        return MomentResult(0.0, "quadrature", 0.0)
    n = q.range.values()
    if int(np.abs(n).max()) ** 4 >= 2**53:
        raise ParameterError("range too large for floating quadrature")

    # a whole-period axis is sampled on [0, 1) and weighted by its length
    span_a, span_g = a1 - a0, g1 - g0
    if per_a and per_g and real:
        fine = span_a * span_g / (ma * mg) * _reflected_sum(coeffs, n, ma, mg, q.p)
        return MomentResult(fine, "quadrature", 1e-10 * abs(fine))

    def grid(ka: int, kg: int) -> float:
        alphas = _midpoints(0.0, 1.0, ka) if per_a else _midpoints(a0, a1, ka)
        gammas = _midpoints(0.0, 1.0, kg) if per_g else _midpoints(g0, g1, kg)
        return span_a * span_g / (ka * kg) * _grid_sum(coeffs, n, alphas, gammas, q.p)

    fine = grid(ma, mg)
    rounding = 1e-10 * abs(fine)
    if per_a and per_g:
        return MomentResult(fine, "quadrature", rounding)
    coarse = grid(coarse_a, coarse_g)
    return MomentResult(fine, "quadrature", abs(fine - coarse) / 3.0 + rounding)


# --------------------------------------------------------------------------
# specialisations


def _window_query(N: float, p: int, alpha_interval=(0.0, 1.0)) -> MomentQuery:
    lam = float(N) ** -3
    rng = IntRange(math.floor(N), math.floor(2 * N))
    return MomentQuery(p, rng, alpha_interval, (-lam, lam))


def integral_I(N: float, p: int = 3, budget: int = DEFAULT_SPECTRUM_BUDGET) -> MomentResult:
    """alpha over [0, 1], gamma over [-N^-3, N^-3], n over (N, 2N].

    Non-integer N is allowed; the range is then (floor N, floor 2N].
    """
    if N < 1:
        raise ParameterError("N must be >= 1")
    return moment_exact(_window_query(N, p), budget)


@dataclass(frozen=True)
class RResult:
    value: float
    error_estimate: float
    ratio: float  # R / (Delta (log N)^6 (I(2 Delta N) + I(4 Delta N)))
    i_small: float
    i_large: float


def integral_R(
    Delta: float,
    N: int,
    p: int = 3,
    safety: float = DEFAULT_SAFETY,
    max_N: int = 32,
    grid_budget: int = DEFAULT_GRID_BUDGET,
) -> RResult:
    """Quadrature of |S|^(2p) over [Delta, 2 Delta] x [-N^-3, N^-3].

    Requires N^(-1/2) <= Delta <= 1/4.  The reported ratio compares R with
    Delta (log N)^6 (I(2 Delta N) + I(4 Delta N)), natural log.
    """
    if N > max_N:
        raise ParameterError(f"N={N} exceeds max_N={max_N}")
    if N < 2:
        raise ParameterError("N must be >= 2")
    if not (N**-0.5 <= Delta <= 0.25):
        raise ParameterError("Delta must satisfy N^(-1/2) <= Delta <= 1/4")
    lam = float(N) ** -3
    q = MomentQuery(p, IntRange.dyadic(N), (Delta, 2 * Delta), (-lam, lam))
    r = moment_quadrature(q, safety, grid_budget)
    i_small = integral_I(2 * Delta * N, p).value
    i_large = integral_I(4 * Delta * N, p).value
    ratio = r.value / (Delta * math.log(N) ** 6 * (i_small + i_large))
    return RResult(r.value, r.error_estimate, ratio, i_small, i_large)


def small_alpha_moment(N: int, p: int = 3, safety: float = DEFAULT_SAFETY,
                       grid_budget: int = DEFAULT_GRID_BUDGET) -> MomentResult:
    """Quadrature over [0, N^(-1/2)] x [-N^-3, N^-3]; expected O((log N)^6)."""
    lam = float(N) ** -3
    q = MomentQuery(p, IntRange.dyadic(N), (0.0, N**-0.5), (-lam, lam))
    return moment_quadrature(q, safety, grid_budget)


# --------------------------------------------------------------------------
# exponents


def exponent_recurrence(beta0: float, n: int) -> float:
    """Apply beta -> beta / (1 + beta) n times."""
    if beta0 < 0:
        raise ParameterError("beta0 must be nonnegative")
    beta = float(beta0)
    for _ in range(n):
        beta = beta / (1.0 + beta)
    return beta


def exponent_closed_form(beta0: float, n: int) -> float:
    return beta0 / (1.0 + n * beta0)


def fit_exponent(samples: Sequence[tuple[float, float]]) -> tuple[float, float, float]:
    """Least-squares line through (log scale, log value).

    Returns (slope, intercept, rms residual); logs are natural.
    """
    if len(samples) < 2:
        raise ParameterError("need at least two samples")
    x = np.array([s[0] for s in samples], dtype=np.float64)
    y = np.array([s[1] for s in samples], dtype=np.float64)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ParameterError("samples must be positive")
    lx, ly = np.log(x), np.log(y)
    design = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(design, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))
