"""Flooding belief propagation / min-sum, peeling, exhaustive ML and the WER harness.

Decoders run on a batch of words at once: messages live in ``(B, E)`` arrays
and check nodes are processed through a padded ``(L, max_degree)`` slot map.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.stats import binom

from .channel import (LLR_MAX, ChannelConfig, ReceivedWord, channel_llr, llr_from_gains,
                      outage_probability, outage_quadrature, sample_fading)
from .construct import RootLdpcCode
from .gf2 import BinaryMatrix, BudgetExceededError, enumerate_codewords, kernel_basis
from .stats import binomial_ci

VARIANTS = ("bp", "min-sum", "peeling", "ml-exhaustive")


@dataclass(frozen=True)
class DecoderConfig:
    variant: str = "bp"
    max_iter: int = 50
    llr_clip: float = LLR_MAX
    early_stop: bool = True

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown decoder variant {self.variant!r}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0 < self.llr_clip <= LLR_MAX:
            raise ValueError(f"llr_clip must lie in (0, {LLR_MAX}]")


@dataclass(frozen=True)
class DecodeResult:
    hard_bits: np.ndarray
    converged: bool
    iterations_used: int
    info_error: bool
    word_error: bool


@dataclass
class BatchResult:
    hard_bits: np.ndarray       # (B, N)
    converged: np.ndarray       # (B,)
    iterations: np.ndarray      # (B,)
    info_error: np.ndarray      # (B,)
    word_error: np.ndarray      # (B,)
    c2v: np.ndarray | None = None

    def __getitem__(self, i) -> DecodeResult:
        return DecodeResult(self.hard_bits[i], bool(self.converged[i]), int(self.iterations[i]),
                            bool(self.info_error[i]), bool(self.word_error[i]))


def parity_matrix(code) -> BinaryMatrix:
    return code.H if isinstance(code, RootLdpcCode) else code


def info_positions(code, explicit=None) -> np.ndarray:
    if explicit is not None:
        return np.asarray(explicit, dtype=np.int64)
    if isinstance(code, RootLdpcCode):
        return code.info_positions
    return np.arange(parity_matrix(code).cols)


# ----------------------------------------------------------- check rules

def _phi(x):
    """``-log tanh(x/2)``, its own inverse on (0, inf)."""
    with np.errstate(divide="ignore", over="ignore"):
        return np.log1p(2.0 / np.expm1(x))


def _exclusive(op, x, identity):
    """Leave-one-out reduction of ``op`` along the last axis."""
    pre = np.empty_like(x)
    suf = np.empty_like(x)
    pre[..., 0] = identity
    suf[..., -1] = identity
    if x.shape[-1] > 1:
        pre[..., 1:] = op.accumulate(x[..., :-1], axis=-1)
        suf[..., :-1] = op.accumulate(x[..., ::-1], axis=-1)[..., ::-1][..., 1:]
    return pre, suf


def _signs(m):
    return np.where(m < 0, -1.0, 1.0)


def _check_bp(m, clip):
    s_pre, s_suf = _exclusive(np.multiply, _signs(m), 1.0)
    p_pre, p_suf = _exclusive(np.add, _phi(np.abs(m)), 0.0)
    mag = _phi(p_pre + p_suf)
    return np.clip(s_pre * s_suf * mag, -clip, clip)


def _check_minsum(m, clip):
    s_pre, s_suf = _exclusive(np.multiply, _signs(m), 1.0)
    a_pre, a_suf = _exclusive(np.minimum, np.abs(m), np.inf)
    return np.clip(s_pre * s_suf * np.minimum(a_pre, a_suf), -clip, clip)


def check_update_bp(inputs: Sequence[float], clip: float = LLR_MAX) -> float:
    """Tanh-rule extrinsic output for the given incoming LLRs."""
    m = np.clip(np.asarray(inputs, dtype=float), -clip, clip)
    if m.size == 0:
        raise ValueError("need at least one input")
    sign = float(np.prod(_signs(m)))
    return float(np.clip(sign * _phi(np.sum(_phi(np.abs(m)))), -clip, clip))


def check_update_minsum(inputs: Sequence[float]) -> float:
    m = np.asarray(inputs, dtype=float)
    if m.size == 0:
        raise ValueError("need at least one input")
    return float(np.prod(_signs(m)) * np.min(np.abs(m)))


# ----------------------------------------------------------- Tanner graph

class TannerGraph:
    """Edge bookkeeping for a parity-check matrix (edges sorted by check)."""

    def __init__(self, H: BinaryMatrix):
        bits = H.bits
        self.L, self.N = bits.shape
        chk, var = np.nonzero(bits)
        self.E = E = chk.size
        self.edge_chk, self.edge_var = chk, var
        dc = np.bincount(chk, minlength=self.L)
        dv = np.bincount(var, minlength=self.N)
        starts = np.concatenate([[0], np.cumsum(dc)[:-1]])
        pos = np.arange(E) - starts[chk]
        self.chk_slots = np.full((self.L, max(1, dc.max())), E + 1, dtype=np.int64)
        self.chk_slots[chk, pos] = np.arange(E)
        self.chk_mask = self.chk_slots < E
        self.chk_vars = np.full(self.chk_slots.shape, self.N, dtype=np.int64)
        self.chk_vars[chk, pos] = var
        order = np.argsort(var, kind="stable")
        vstarts = np.concatenate([[0], np.cumsum(dv)[:-1]])
        vpos = np.arange(E) - vstarts[var[order]]
        self.var_slots = np.full((self.N, max(1, dv.max())), E, dtype=np.int64)
        self.var_slots[var[order], vpos] = order
        self._edge_lookup = {(int(c), int(v)): e for e, (c, v) in enumerate(zip(chk, var))}

    def edge(self, check: int, var: int) -> int:
        return self._edge_lookup[(check, var)]

    def syndrome_ok(self, hard: np.ndarray) -> np.ndarray:
        padded = np.concatenate([hard, np.zeros((hard.shape[0], 1), dtype=hard.dtype)], axis=1)
        return ~(padded[:, self.chk_vars].sum(axis=2) % 2).astype(bool).any(axis=1)


@lru_cache(maxsize=32)
def _graph_cached(H: BinaryMatrix) -> TannerGraph:
    return TannerGraph(H)


def tanner_graph(code) -> TannerGraph:
    return _graph_cached(parity_matrix(code))


def decode_batch(code, llr: np.ndarray, cfg: DecoderConfig = DecoderConfig(),
                 info=None, keep_messages: bool = False) -> BatchResult:
    """Flooding message passing on a ``(B, N)`` batch of channel LLRs.

    A word stops when its syndrome is zero (with ``early_stop``) or when its
    check-to-variable messages reach a fixed point. Hard decisions take
    ``LLR <= 0`` as bit 1.
    """
    if cfg.variant not in ("bp", "min-sum"):
        raise ValueError(f"decode_batch handles bp/min-sum, not {cfg.variant!r}")
    g = tanner_graph(code)
    llr = np.atleast_2d(np.asarray(llr, dtype=float))
    if llr.shape[1] != g.N:
        raise ValueError(f"expected LLRs of length {g.N}, got {llr.shape[1]}")
    clip = cfg.llr_clip
    rule = _check_bp if cfg.variant == "bp" else _check_minsum
    info_idx = info_positions(code, info)
    B = llr.shape[0]

    hard_out = np.zeros((B, g.N), dtype=np.uint8)
    conv_out = np.zeros(B, dtype=bool)
    iter_out = np.zeros(B, dtype=np.int64)
    c2v_out = np.zeros((B, g.E)) if keep_messages else None

    active = np.arange(B)
    ch = np.clip(llr, -clip, clip)
    c2v = np.zeros((B, g.E + 1))
    v2c = np.zeros((B, g.E + 2))
    v2c[:, g.E + 1] = clip   # padding slots are transparent at check nodes
    for it in range(1, cfg.max_iter + 1):
        total = ch + c2v[:, g.var_slots].sum(axis=2)
        v2c[:, :g.E] = np.clip(total[:, g.edge_var] - c2v[:, :g.E], -clip, clip)
        out = rule(v2c[:, g.chk_slots], clip)
        new = out[:, g.chk_mask]
        fixpoint = np.all(new == c2v[:, :g.E], axis=1)
        c2v[:, :g.E] = new
        total = ch + c2v[:, g.var_slots].sum(axis=2)
        hard = (total <= 0).astype(np.uint8)
        ok = g.syndrome_ok(hard)
        stop = fixpoint | (ok if cfg.early_stop else False) | (it == cfg.max_iter)
        if stop.any():
            idx = active[stop]
            hard_out[idx] = hard[stop]
            conv_out[idx] = ok[stop]
            iter_out[idx] = it
            if keep_messages:
                c2v_out[idx] = c2v[stop, :g.E]
            keep = ~stop
            active, ch, c2v, v2c = active[keep], ch[keep], c2v[keep], v2c[keep]
        if active.size == 0:
            break
    info_err = hard_out[:, info_idx].any(axis=1) if info_idx.size else np.zeros(B, dtype=bool)
    return BatchResult(hard_out, conv_out, iter_out, info_err, hard_out.any(axis=1), c2v_out)


def decode(code, llr: np.ndarray, cfg: DecoderConfig = DecoderConfig(), info=None,
           transmitted=None) -> DecodeResult:
    """Decode one word; errors are judged against ``transmitted`` (default all-zero)."""
    llr = np.asarray(llr, dtype=float)
    if llr.ndim != 1:
        raise ValueError("decode expects a single LLR vector")
    H = parity_matrix(code)
    if llr.size != H.cols:
        raise ValueError(f"expected LLRs of length {H.cols}, got {llr.size}")
    flip = None
    if transmitted is not None:
        # decode relative to the transmitted word: flip LLR signs on its 1s
        flip = np.asarray(transmitted, dtype=np.uint8)
        llr = np.where(flip == 1, -llr, llr)
    if cfg.variant == "peeling":
        res = decode_peeling(code, llr == 0, info=info)
        hard = res.erased.astype(np.uint8)
        out = DecodeResult(hard, res.converged, res.iterations, res.info_error, res.word_error)
    elif cfg.variant == "ml-exhaustive":
        out = _ml_batch(code, llr[None, :], info)[0]
    else:
        out = decode_batch(code, llr[None, :], cfg, info)[0]
    if flip is not None:
        out = DecodeResult(out.hard_bits ^ flip, out.converged, out.iterations_used,
                           out.info_error, out.word_error)
    return out


# --------------------------------------------------------------- peeling

@dataclass(frozen=True)
class PeelingResult:
    erased: np.ndarray          # positions still unknown after peeling
    iterations: int
    converged: bool
    info_error: bool
    word_error: bool
    residual_by_class: dict = field(default_factory=dict)


def _peel(H: sparse.csr_matrix, erased: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Peel a batch of erasure patterns (B, N); returns what stays erased and the rounds used."""
    erased = erased.copy()
    rounds = np.zeros(erased.shape[0], dtype=np.int64)
    live = np.flatnonzero(erased.any(axis=1))
    HT = H.T.tocsr()
    while live.size:
        e = erased[live].astype(np.int32)
        singles = (sparse.csr_matrix(e) @ HT).toarray() == 1
        hit = (sparse.csr_matrix(singles.astype(np.int32)) @ H).toarray() > 0
        resolved = hit & erased[live]
        moved = resolved.any(axis=1)
        if not moved.any():
            break
        erased[live] &= ~resolved
        rounds[live[moved]] += 1
        live = live[moved & erased[live].any(axis=1)]
    return erased, rounds


def decode_peeling(code, erasure_mask, info=None) -> PeelingResult:
    """Resolve erased bits through checks with a single erased neighbour, to a fixpoint."""
    H = sparse.csr_matrix(parity_matrix(code).bits.astype(np.int32))
    left, rounds = _peel(H, np.asarray(erasure_mask, dtype=bool)[None, :])
    erased, it = left[0], int(rounds[0])
    info_idx = info_positions(code, info)
    residual = {}
    if isinstance(code, RootLdpcCode):
        residual = {c: int(erased[code.columns_of(c)].sum()) for c in ("1i", "1p", "2i", "2p")}
    return PeelingResult(erased, it, not erased.any(), bool(erased[info_idx].any()),
                         bool(erased.any()), residual)


# ----------------------------------------------------------- exhaustive ML

def _codebook(code, budget_log2: int = 20) -> np.ndarray:
    H = parity_matrix(code)
    k = kernel_basis(H).shape[0]
    if k > budget_log2:
        raise BudgetExceededError(f"code dimension {k} exceeds the ML budget 2^{budget_log2}")
    return enumerate_codewords(H, budget_log2)


def _ml_batch(code, llr: np.ndarray, info=None) -> list[DecodeResult]:
    words = _codebook(code)
    X = 1.0 - 2.0 * words
    scores = llr @ X.T
    # among tied maximisers take the last one, so ties never favour the zero word
    best = X.shape[0] - 1 - np.argmax(scores[:, ::-1], axis=1)
    hard = words[best]
    info_idx = info_positions(code, info)
    return [DecodeResult(h, True, 1, bool(h[info_idx].any()), bool(h.any())) for h in hard]


def decode_ml_exhaustive(code, w: ReceivedWord, info=None) -> DecodeResult:
    """Codeword maximising the fading-weighted correlation ``sum y_i a_j(i) x_i``.

    Error flags assume the all-zero word was sent.
    """
    gains = w.fading.gain_per_symbol(w.y.size)
    with np.errstate(invalid="ignore"):
        metric = np.nan_to_num(gains * w.y, nan=0.0, posinf=1e300, neginf=-1e300)
    metric = np.where(gains == 0, 0.0, metric)
    return _ml_batch(code, metric[None, :], info)[0]


# ------------------------------------------------------------ WER harness

@dataclass(frozen=True)
class StopRule:
    min_errors: int = 100
    max_trials: int = 10_000_000


@dataclass
class WerPoint:
    ebn0_db: float
    trials: int
    word_errors: int
    ci_low: float
    ci_high: float
    avg_iterations: float
    outage: float = math.nan

    @property
    def wer(self) -> float:
        return self.word_errors / self.trials if self.trials else math.nan


@dataclass
class WerCurve:
    points: list[WerPoint]

    @property
    def ebn0_db(self):
        return [p.ebn0_db for p in self.points]

    @property
    def wer(self):
        return [p.wer for p in self.points]

    def to_csv(self, header: str = "") -> str:
        buf = io.StringIO()
        for line in header.splitlines():
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["ebn0_db", "trials", "word_errors", "wer", "ci_low", "ci_high",
                    "avg_iterations", "outage"])
        for p in self.points:
            w.writerow([f"{p.ebn0_db:.6g}", p.trials, p.word_errors, f"{p.wer:.6e}",
                        f"{p.ci_low:.6e}", f"{p.ci_high:.6e}", f"{p.avg_iterations:.4f}",
                        f"{p.outage:.6e}"])
        return buf.getvalue()


def _batch_rng(seed: int, point: int, batch: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point, batch)))


def _default_batch(code) -> int:
    E = int(parity_matrix(code).bits.sum())
    return int(max(8, min(4096, 3_000_000 // max(E, 1))))


def simulate_point(code, ch: ChannelConfig, dec: DecoderConfig, stop: StopRule, seed: int,
                   point_index: int = 0, batch_size: int | None = None,
                   all_bits: bool = False, level: float = 0.99) -> WerPoint:
    """Word-error statistics at a single SNR, sending the all-zero codeword."""
    H = parity_matrix(code)
    N = H.cols
    if N % ch.nc:
        raise ValueError(f"N={N} not divisible by nc={ch.nc}")
    ell = N // ch.nc
    sigma2 = ch.sigma2
    bs = batch_size or _default_batch(code)
    trials = errors = 0
    iters = 0
    b = 0
    peel_H = None
    while errors < stop.min_errors and trials < stop.max_trials:
        n = min(bs, stop.max_trials - trials)
        rng = _batch_rng(seed, point_index, b)
        a = sample_fading(ch, rng, n)
        gains = np.repeat(a, ell, axis=1)
        noise = rng.normal(0.0, math.sqrt(sigma2), size=(n, N))
        with np.errstate(invalid="ignore"):
            y = gains * math.sqrt(ch.es) + noise
        llr = llr_from_gains(y, gains, sigma2, ch.es, dec.llr_clip)
        if dec.variant in ("bp", "min-sum"):
            res = decode_batch(code, llr, dec)
            err, it = (res.word_error if all_bits else res.info_error), res.iterations
        elif dec.variant == "peeling":
            if peel_H is None:
                peel_H = sparse.csr_matrix(H.bits.astype(np.int32))
                info_idx = info_positions(code, None)
            left, it = _peel(peel_H, llr == 0)
            err = left.any(axis=1) if all_bits else left[:, info_idx].any(axis=1)
        else:
            metric = np.where(gains == 0, 0.0, np.nan_to_num(gains * y, posinf=1e300, neginf=-1e300))
            out = _ml_batch(code, metric)
            err = np.array([o.word_error if all_bits else o.info_error for o in out])
            it = np.ones(n)
        trials += n
        errors += int(np.sum(err))
        iters += int(np.sum(it))
        b += 1
    lo, hi = binomial_ci(errors, trials, level)
    return WerPoint(ch.ebn0_db, trials, errors, lo, hi, iters / max(trials, 1))


def _matching_outage(ch: ChannelConfig, samples: int, seed: int) -> float:
    if ch.mode == "rayleigh" and ch.nc == 2:
        return outage_quadrature(ch.gamma, ch.rate)
    if ch.mode == "erasure":
        # outage iff more than a fraction 1 - R of the blocks are erased
        max_erased = math.floor(ch.nc * (1 - ch.rate) + 1e-12)
        return float(binom.sf(max_erased, ch.nc, ch.epsilon))
    return outage_probability(ch.gamma, ch.rate, ch.nc, samples, seed, ch.mode, ch.epsilon).p


def simulate_wer(code, ch: ChannelConfig, dec: DecoderConfig, ebn0_list: Sequence[float],
                 stop: StopRule = StopRule(), seed: int = 0, batch_size: int | None = None,
                 all_bits: bool = False, with_outage: bool = True, outage_samples: int = 100_000,
                 workers: int = 1) -> WerCurve:
    """WER curve over ``ebn0_list``; every point draws from its own seed stream."""
    jobs = [(code, ch.at(e), dec, stop, seed, k, batch_size, all_bits) for k, e in enumerate(ebn0_list)]
    if workers > 1 and len(jobs) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as ex:
            points = list(ex.map(_run_point, jobs))
    else:
        points = [_run_point(j) for j in jobs]
    if with_outage:
        for p in points:
            p.outage = _matching_outage(ch.at(p.ebn0_db), outage_samples, seed)
    return WerCurve(points)


def _run_point(args) -> WerPoint:
    return simulate_point(*args)


def random_codeword(code, rng) -> np.ndarray:
    basis = kernel_basis(parity_matrix(code))
    coeffs = rng.integers(0, 2, size=basis.shape[0])
    return ((coeffs @ basis) % 2).astype(np.uint8)
