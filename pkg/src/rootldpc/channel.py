"""Block-fading BPSK channel, mutual information and outage probability."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize

from .stats import binomial_ci

LLR_MAX = 50.0
MI_NODES = 256


@dataclass(frozen=True)
class ChannelConfig:
    nc: int = 2
    rate: float = 0.5
    ebn0_db: float = 10.0
    mode: str = "rayleigh"          # rayleigh | erasure | fixed
    epsilon: float = 0.0            # erasure probability per block
    alpha: tuple[float, ...] = ()   # gains for fixed mode
    es: float = 1.0

    def __post_init__(self):
        if self.nc < 1:
            raise ValueError("nc must be >= 1")
        if self.mode not in ("rayleigh", "erasure", "fixed"):
            raise ValueError(f"unknown fading mode {self.mode!r}")
        if self.mode == "fixed" and len(self.alpha) != self.nc:
            raise ValueError("fixed mode needs one gain per block")

    @property
    def gamma(self) -> float:
        """Average SNR per symbol, ``R * Eb/N0`` (linear)."""
        return self.rate * 10.0 ** (self.ebn0_db / 10.0)

    @property
    def n0(self) -> float:
        return self.es / self.gamma

    @property
    def sigma2(self) -> float:
        return self.n0 / 2.0

    def at(self, ebn0_db: float) -> "ChannelConfig":
        return ChannelConfig(self.nc, self.rate, ebn0_db, self.mode, self.epsilon, self.alpha, self.es)


@dataclass(frozen=True)
class FadingRealization:
    # np.inf marks an unerased block of the block-erasure channel
    alpha: np.ndarray

    def gain_per_symbol(self, n: int) -> np.ndarray:
        a = np.asarray(self.alpha, dtype=float)
        if n % a.size:
            raise ValueError(f"N={n} not divisible by nc={a.size}")
        return np.repeat(a, n // a.size)


@dataclass(frozen=True)
class ReceivedWord:
    y: np.ndarray
    fading: FadingRealization
    sigma2: float
    es: float = field(default=1.0)


def sample_fading(cfg: ChannelConfig, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Fading gains, shape ``(nc,)`` or ``(size, nc)``."""
    shape = (cfg.nc,) if size is None else (size, cfg.nc)
    if cfg.mode == "fixed":
        return np.broadcast_to(np.asarray(cfg.alpha, dtype=float), shape).copy()
    if cfg.mode == "erasure":
        erased = rng.random(shape) < cfg.epsilon
        return np.where(erased, 0.0, np.inf)
    u = 1.0 - rng.random(shape)   # uniform on (0, 1]
    return np.sqrt(-np.log(u))


def sample_fading_realization(cfg: ChannelConfig, rng) -> FadingRealization:
    return FadingRealization(sample_fading(cfg, rng))


def bpsk(bits: np.ndarray, es: float = 1.0) -> np.ndarray:
    """Bit 0 -> +sqrt(Es), bit 1 -> -sqrt(Es)."""
    return math.sqrt(es) * (1.0 - 2.0 * np.asarray(bits, dtype=float))


def transmit(c, fading: FadingRealization, sigma2: float, rng: np.random.Generator,
             es: float = 1.0) -> ReceivedWord:
    x = bpsk(c, es)
    gains = fading.gain_per_symbol(x.size)
    noise = rng.normal(0.0, math.sqrt(sigma2), size=x.size) if sigma2 > 0 else np.zeros(x.size)
    with np.errstate(invalid="ignore"):
        y = gains * x + noise
    return ReceivedWord(y, fading, sigma2, es)


def llr_from_gains(y: np.ndarray, gains: np.ndarray, sigma2: float, es: float = 1.0,
                   clip: float = LLR_MAX) -> np.ndarray:
    """``2 a sqrt(Es) y / sigma^2`` per symbol, erased symbols mapped to exactly 0."""
    y = np.asarray(y, dtype=float)
    gains = np.broadcast_to(gains, y.shape)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        if sigma2 > 0:
            llr = 2.0 * math.sqrt(es) * gains * y / sigma2
        else:
            llr = np.sign(gains * y) * np.inf
    llr = np.where(gains == 0, 0.0, llr)
    llr = np.nan_to_num(llr, nan=0.0, posinf=clip, neginf=-clip)
    return np.clip(llr, -clip, clip)


def channel_llr(w: ReceivedWord, clip: float = LLR_MAX) -> np.ndarray:
    gains = w.fading.gain_per_symbol(w.y.size)
    return llr_from_gains(w.y, gains, w.sigma2, w.es, clip)


# ------------------------------------------------------------- mutual info

@lru_cache(maxsize=None)
def _hermite(n: int):
    t, w = np.polynomial.hermite.hermgauss(n)
    return t, w / math.sqrt(math.pi)


def bpsk_awgn_mi(s, nodes: int = MI_NODES):
    """Binary-input AWGN mutual information (bits) at SNR per symbol ``s``.

    The channel LLR given a transmitted +1 is Normal(4s, 8s); the expectation
    of ``log2(1 + exp(-L))`` is taken with a fixed Gauss-Hermite rule.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValueError("SNR must be nonnegative")
    t, w = _hermite(nodes)
    mu = 4.0 * s_arr
    with np.errstate(invalid="ignore"):
        L = mu[..., None] + 2.0 * np.sqrt(mu)[..., None] * t
        loss = np.logaddexp(0.0, -L) @ w / math.log(2.0)
    out = np.where(np.isinf(s_arr), 1.0, np.where(s_arr == 0, 0.0, 1.0 - loss))
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def inverse_mi(target: float) -> float:
    """SNR per symbol ``s`` with ``bpsk_awgn_mi(s) == target``."""
    if target <= 0:
        return 0.0
    if target >= 1:
        return math.inf
    f = lambda ls: bpsk_awgn_mi(math.exp(ls)) - target
    lo, hi = -40.0, 8.0
    if f(hi) < 0:
        return math.inf
    return math.exp(optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-14))


def capacity_limit_ebn0_db(rate: float = 0.5) -> float:
    """Smallest Eb/N0 (dB) at which BPSK mutual information reaches ``rate``."""
    return 10.0 * math.log10(inverse_mi(rate) / rate)


def instantaneous_mi(gamma: float, alpha) -> float | np.ndarray:
    """Mean over blocks of ``I_AWGN(gamma * alpha_j^2)``; ``alpha`` may be batched on axis 0."""
    a = np.asarray(alpha, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        s = gamma * a * a
    s = np.where(np.isnan(s), 0.0, s)
    mi = bpsk_awgn_mi(s)
    return np.mean(mi, axis=-1)


# ---------------------------------------------------------------- outage

@dataclass(frozen=True)
class OutageEstimate:
    p: float
    ci_low: float
    ci_high: float
    samples: int
    outages: int


def outage_probability(gamma: float, rate: float, nc: int, samples: int, rng,
                       mode: str = "rayleigh", epsilon: float = 0.0,
                       chunk: int = 1 << 18, level: float = 0.99) -> OutageEstimate:
    """Monte-Carlo estimate of ``Pr{I(gamma, alpha) < R}``.

    Mutual information is only evaluated for draws that monotonicity cannot
    settle: if every block sits above (below) the per-block SNR reaching
    ``R``, the mean is above (below) ``R``.
    """
    rng = np.random.default_rng(rng)
    cfg = ChannelConfig(nc=nc, rate=rate, mode=mode, epsilon=epsilon)
    s_star = inverse_mi(rate)
    outages = 0
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        a = sample_fading(cfg, rng, n)
        with np.errstate(invalid="ignore"):
            s = gamma * a * a
        s = np.where(np.isnan(s), 0.0, s)
        above = np.all(s >= s_star, axis=1)
        below = np.all(s < s_star, axis=1)
        unsure = ~(above | below)
        hits = int(below.sum())
        if unsure.any():
            mi = np.mean(bpsk_awgn_mi(s[unsure]), axis=1)
            hits += int((mi < rate).sum())
        outages += hits
        done += n
    lo, hi = binomial_ci(outages, samples, level)
    return OutageEstimate(outages / samples, lo, hi, samples, outages)


def outage_quadrature(gamma: float, rate: float = 0.5) -> float:
    """Deterministic two-block Rayleigh outage probability.

    Integrates over the first block's exponential power; the second block's
    outage set ``{x2 < x2*(x1)}`` has closed-form exponential probability.
    """
    def inner(x1):
        target = 2.0 * rate - bpsk_awgn_mi(gamma * x1)
        if target <= 0:
            return 0.0
        s2 = inverse_mi(target)
        return -math.expm1(-s2 / gamma) if math.isfinite(s2) else 1.0

    f = lambda x: math.exp(-x) * inner(x)
    knee = inverse_mi(min(rate, 1 - 1e-15)) / gamma
    total = 0.0
    lo = 0.0
    for hi in (knee, 4 * knee, 60.0):
        if hi > lo:
            val, _ = integrate.quad(f, lo, hi, epsabs=1e-15, epsrel=1e-11, limit=400)
            total += val
            lo = hi
    return total
