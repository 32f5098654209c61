"""Numerical Van der Corput B-transform for g(x) = alpha x^2 + gamma x^4.

Within the domain 0 < alpha <= 1/2, |gamma| <= alpha / (96 N^2) we have
g''(x) in [1.5 alpha, 2.5 alpha] on [N, 2N], so g' is strictly increasing and
its inverse z(y) is well defined on [g'(N), g'(2N)].
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .expsum import TWO_PI, frac_mul

NEWTON_MAX_ITER = 50
NEWTON_RTOL = 1e-12


def validate_domain(alpha: float, gamma: float, N: int) -> bool:
    """True iff 0 < alpha <= 1/2 and |gamma| <= alpha / (96 N^2)."""
    return 0 < alpha <= 0.5 and abs(gamma) <= alpha / (96 * N**2)


@dataclass(frozen=True)
class SmoothPhase:
    alpha: float
    gamma: float
    N: int
    A: float = 2.0

    def __post_init__(self):
        if not validate_domain(self.alpha, self.gamma, self.N):
            raise ParameterError(
                f"(alpha={self.alpha}, gamma={self.gamma}, N={self.N}) outside the domain"
            )
        if self.A <= 1:
            raise ParameterError("A must exceed 1")

    def g(self, x):
        return self.alpha * x * x + self.gamma * x**4

    def g1(self, x):
        return 2 * self.alpha * x + 4 * self.gamma * x**3

    def g2(self, x):
        return 2 * self.alpha + 12 * self.gamma * x * x

    @property
    def lambda2(self) -> float:
        """Minimum of g'' on [N, A N]."""
        return min(self.g2(self.N), self.g2(self.A * self.N))

    @property
    def image(self) -> tuple[float, float]:
        return self.g1(self.N), self.g1(self.A * self.N)


def invert_derivative(phase: SmoothPhase, y: float) -> float:
    """Solve g'(z) = y for z in [N, A N] by safeguarded Newton."""
    lo, hi = float(phase.N), float(phase.A * phase.N)
    ylo, yhi = phase.image
    if not (ylo <= y <= yhi):
        raise ParameterError(f"y={y} outside [{ylo}, {yhi}]")
    tol = NEWTON_RTOL * abs(y)
    z = y / (2 * phase.alpha)
    if not lo <= z <= hi:
        z = 0.5 * (lo + hi)
    for _ in range(NEWTON_MAX_ITER):
        r = phase.g1(z) - y
        if abs(r) <= tol:
            return z
        # g' is increasing: keep a bracket for the bisection fallback
        if r > 0:
            hi = z
        else:
            lo = z
        step = z - r / phase.g2(z)
        z = step if lo < step < hi else 0.5 * (lo + hi)
    r = phase.g1(z) - y
    if abs(r) <= tol:
        return z
    raise RuntimeError(f"Newton did not converge for y={y}")


def transform_value(phase: SmoothPhase, y: float) -> float:
    """g*(y) = g(z(y)) - y z(y)."""
    z = invert_derivative(phase, y)
    return phase.g(z) - y * z


def expansion_value(alpha: float, gamma: float, y: float) -> float:
    """Degree-6 expansion of g*(y) in powers of gamma."""
    if alpha == 0:
        raise ParameterError("alpha must be nonzero")
    return -(y**2) / (4 * alpha) + gamma * y**4 / (16 * alpha**4) - gamma**2 * y**6 / (16 * alpha**7)


def expansion_residual(phase: SmoothPhase, ys) -> np.ndarray:
    return np.array([transform_value(phase, y) - expansion_value(phase.alpha, phase.gamma, y) for y in ys])


def nu_range(phase: SmoothPhase) -> range:
    lo, hi = phase.image
    return range(math.ceil(lo), math.floor(hi) + 1)


def _e(x: float) -> complex:
    return cmath.exp(1j * TWO_PI * (x - math.floor(x)))


def direct_sum(phase: SmoothPhase) -> complex:
    """Sum of e(g(n)) for N < n <= A N."""
    n = np.arange(phase.N + 1, math.floor(phase.A * phase.N) + 1, dtype=np.int64)
    f = frac_mul(phase.alpha, n * n) + frac_mul(phase.gamma, n**4)
    t = np.exp(1j * TWO_PI * (f - np.floor(f)))
    return complex(math.fsum(t.real), math.fsum(t.imag))


def dual_sum(phase: SmoothPhase, normalization: str = "sqrt", drop_ends: bool = False) -> complex:
    """e^{i pi/4} times the sum over integer nu in the image of g' of
    e(g*(nu)) / g''(z(nu))^(1/2).

    ``normalization="linear"`` divides by g''(z(nu)) instead, the unsquared
    variant kept for comparison.
    """
    if normalization not in ("sqrt", "linear"):
        raise ParameterError("normalization must be 'sqrt' or 'linear'")
    nus = list(nu_range(phase))
    if drop_ends:
        nus = nus[1:-1]
    re, im = [], []
    for nu in nus:
        z = invert_derivative(phase, float(nu))
        w = phase.g2(z)
        w = math.sqrt(w) if normalization == "sqrt" else w
        t = _e(phase.g(z) - nu * z) / w
        re.append(t.real)
        im.append(t.imag)
    return cmath.exp(1j * math.pi / 4) * complex(math.fsum(re), math.fsum(im))


def b_transform_residual(
    phase: SmoothPhase, normalization: str = "sqrt", drop_ends: bool = False
) -> tuple[complex, complex, float]:
    """(direct sum, dual sum, |difference|)."""
    lhs = direct_sum(phase)
    rhs = dual_sum(phase, normalization, drop_ends) if len(nu_range(phase)) else 0j
    return lhs, rhs, abs(lhs - rhs)


def residual_envelope(N: int, lambda2: float, constant: float = 10.0) -> float:
    """constant * (log(2 + N lambda2) + lambda2^(-1/2))."""
    return constant * (math.log(2 + N * lambda2) + lambda2**-0.5)


def expansion_scaling(alpha: float, N: int, gamma: float, points: int = 100) -> dict:
    """Residual max |g* - expansion| at gamma and gamma/2 on a shared y-grid.

    The grid is the intersection of both derivative images.  Also reports a
    finite-difference estimate of the residual's y-derivative at both gammas.
    """
    full = SmoothPhase(alpha, gamma, N)
    half = SmoothPhase(alpha, gamma / 2, N)
    lo = max(full.image[0], half.image[0])
    hi = min(full.image[1], half.image[1])
    ys = np.linspace(lo, hi, points)
    r_full = expansion_residual(full, ys)
    r_half = expansion_residual(half, ys)
    dy = ys[1] - ys[0]
    d_full = np.abs(np.diff(r_full)) / dy
    d_half = np.abs(np.diff(r_half)) / dy
    rf, rh = float(np.max(np.abs(r_full))), float(np.max(np.abs(r_half)))
    return {
        "r_gamma": rf,
        "r_half_gamma": rh,
        "ratio": rh / rf,
        "derivative_ratio": float(d_half.max() / d_full.max()),
    }
