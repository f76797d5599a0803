"""Closed-form fading statistics behind the diversity arguments.

``Y = a E1 + b E2`` (E unit exponentials, ``a + b = 1``) is the normalized
energy seen by a codeword split unevenly over two Rayleigh blocks. Its CDF
near zero governs the error-rate asymptote, so the unbalanced case costs a
fixed SNR shift but keeps diversity two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

BALANCE_TOL = 1e-9


class DiversityCollapseError(ValueError):
    """One weight fraction is zero, so the statistic has diversity one."""


@dataclass(frozen=True)
class Chi2Params:
    a: float
    b: float

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("weight fractions must be nonnegative")
        if abs(self.a + self.b - 1.0) > 1e-12:
            raise ValueError(f"a + b must equal 1, got {self.a + self.b}")

    @classmethod
    def from_a(cls, a: float) -> "Chi2Params":
        return cls(a, 1.0 - a)

    @property
    def balanced(self) -> bool:
        return abs(self.a - self.b) < BALANCE_TOL

    @property
    def degenerate(self) -> bool:
        return self.a == 0 or self.b == 0


def _phi(x):
    """``exp(-x) - 1 + x``, accurate for small ``x``."""
    return x + np.expm1(-x)


def chi2_pdf(y, p: Chi2Params):
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("y must be nonnegative")
    if p.balanced:
        out = 4.0 * y * np.exp(-2.0 * y)
    elif p.degenerate:
        w = max(p.a, p.b)
        out = np.exp(-y / w) / w
    else:
        lo, hi = sorted((p.a, p.b))
        out = -np.exp(-y / hi) * np.expm1(-y * (1.0 / lo - 1.0 / hi)) / (hi - lo)
    return float(out) if out.ndim == 0 else out


def chi2_cdf(T, p: Chi2Params):
    T = np.asarray(T, dtype=float)
    if np.any(T < 0):
        raise ValueError("T must be nonnegative")
    if p.balanced:
        out = special.gammainc(2.0, 2.0 * T)
    elif p.degenerate:
        out = -np.expm1(-T / max(p.a, p.b))
    else:
        a, b = p.a, p.b
        out = (b * _phi(T / b) - a * _phi(T / a)) / (a - b)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def chi2_small_t_coefficient(p: Chi2Params) -> float:
    """Leading coefficient ``c`` of ``F(T) ~ c T^2``."""
    if p.degenerate:
        raise DiversityCollapseError("F ~ T near zero when a weight fraction vanishes")
    return 1.0 / (2.0 * p.a * p.b)


def chi2_coding_loss_db(p: Chi2Params) -> float:
    """SNR shift (dB) between the unbalanced and balanced ``T^2`` asymptotes."""
    if p.degenerate:
        raise DiversityCollapseError(
            f"a={p.a}, b={p.b}: one block carries no weight, diversity drops to 1")
    return 5.0 * math.log10(1.0 / (4.0 * p.a * p.b))


# ------------------------------------------------------------- G function

def _tail_abs(t, alpha2: float, sigma: float):
    """``P(|X2| >= t)`` for ``X2 ~ N(alpha2^2, alpha2^2 sigma^2)``."""
    s = alpha2 * sigma
    return special.ndtr(-(t - alpha2 ** 2) / s) + special.ndtr(-(t + alpha2 ** 2) / s)


def g_function(alpha1: float, alpha2: float, sigma2: float, tol: float = 1e-10) -> float:
    """``P(|X2| < |X1|)`` with ``Xk ~ N(ak^2, ak^2 sigma^2)`` independent.

    Written as one minus the expectation of the tail of ``|X2|`` over the
    law of ``|X1|``; the expectation is taken over X1's standard score,
    split where X1 crosses zero.
    """
    if alpha1 <= 0 or alpha2 <= 0 or sigma2 <= 0:
        raise ValueError("alpha1, alpha2 and sigma2 must be positive")
    sigma = math.sqrt(sigma2)

    def integrand(z):
        x = alpha1 ** 2 + alpha1 * sigma * z
        return math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi) * _tail_abs(abs(x), alpha2, sigma)

    # Beyond |z| = 40 the Gaussian weight is below 1e-300. Inside, the
    # integrand bends where X1 crosses zero and where |X1| meets the mean of
    # |X2|; quad needs those as breakpoints when sigma is small.
    span = 40.0
    kink = -alpha1 / sigma
    crossings = [(s * alpha2 ** 2 - alpha1 ** 2) / (alpha1 * sigma) for s in (1.0, -1.0)]
    cuts = sorted({-span, span, *(c for c in [kink, *crossings] if -span < c < span)})
    total, err = 0.0, 0.0
    for lo, hi in zip(cuts, cuts[1:]):
        val, e = integrate.quad(integrand, lo, hi, epsabs=tol, epsrel=tol, limit=400)
        total += val
        err += e
    if err > 1e-7:
        raise RuntimeError(f"G quadrature did not converge (error estimate {err:.2e})")
    return 1.0 - total


def g_function_mc(alpha1: float, alpha2: float, sigma2: float, samples: int, rng) -> tuple[float, float]:
    """Monte-Carlo estimate and standard error of ``P(|X2| < |X1|)``."""
    rng = np.random.default_rng(rng)
    sigma = math.sqrt(sigma2)
    hits = 0
    done = 0
    while done < samples:
        n = min(1 << 20, samples - done)
        x1 = alpha1 ** 2 + alpha1 * sigma * rng.standard_normal(n)
        x2 = alpha2 ** 2 + alpha2 * sigma * rng.standard_normal(n)
        hits += int(np.count_nonzero(np.abs(x2) < np.abs(x1)))
        done += n
    p = hits / samples
    return p, math.sqrt(p * (1 - p) / samples)


@dataclass(frozen=True)
class ParityBound:
    g: float
    g4: float
    complement: float

    @property
    def meets_ergodic_bounds(self) -> bool:
        """At equal gains the four weak inputs all win with probability at least 1/16."""
        return self.g4 >= 1 / 16 - 1e-9 and self.complement <= 15 / 16 + 1e-9


def parity_bound(alpha1: float, alpha2: float, sigma2: float) -> ParityBound:
    """``G^4`` and ``1 - G^4`` for a parity bit's check with four block-1 inputs."""
    g = g_function(alpha1, alpha2, sigma2)
    return ParityBound(g, g ** 4, 1.0 - g ** 4)
