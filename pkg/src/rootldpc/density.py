"""Quantized density evolution for random and root-LDPC ensembles.

Densities live on a symmetric grid of LLR bins plus separate point masses at
+inf and -inf. Variable nodes add LLRs (``conv_var``), check nodes combine
them through the tanh rule (``conv_check``).

Per-block channel quality is expressed as the SNR per symbol ``s = gamma a^2``;
the channel LLR is then Normal(4s, 8s).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numba
import numpy as np
from scipy import integrate, special

from .channel import capacity_limit_ebn0_db, inverse_mi
from .construct import DegreeDistribution, multiedge_fraction
from .stats import binomial_ci, mean_ci

SUCCESS_ERROR = 1e-7
STALL_DECREASE = 1e-12
MAX_ITER = 500


class GridMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    step: float = 0.05
    half_range: float = 30.0

    @property
    def half_bins(self) -> int:
        return int(round(self.half_range / self.step))

    @property
    def size(self) -> int:
        return 2 * self.half_bins + 1

    @property
    def centers(self) -> np.ndarray:
        return np.arange(-self.half_bins, self.half_bins + 1) * self.step


DEFAULT_GRID = Grid()


@dataclass
class LlrDensity:
    grid: Grid
    mass: np.ndarray
    pos_inf: float = 0.0
    neg_inf: float = 0.0

    def total(self) -> float:
        return float(self.mass.sum() + self.pos_inf + self.neg_inf)

    def mean(self) -> float:
        """Mean of the finite part (infinite masses are ignored)."""
        return float(self.mass @ self.grid.centers)

    def scaled(self, w: float) -> "LlrDensity":
        return LlrDensity(self.grid, self.mass * w, self.pos_inf * w, self.neg_inf * w)

    def __add__(self, other: "LlrDensity") -> "LlrDensity":
        _same_grid(self, other)
        return LlrDensity(self.grid, self.mass + other.mass, self.pos_inf + other.pos_inf,
                          self.neg_inf + other.neg_inf)

    def max_abs_diff(self, other: "LlrDensity") -> float:
        return float(max(np.max(np.abs(self.mass - other.mass)), abs(self.pos_inf - other.pos_inf),
                         abs(self.neg_inf - other.neg_inf)))

    def to_text(self, min_mass: float = 0.0) -> str:
        """Histogram dump: one ``center mass`` line per bin, infinities first."""
        buf = io.StringIO()
        buf.write(f"# step={self.grid.step} half_range={self.grid.half_range}\n")
        buf.write(f"-inf {self.neg_inf:.17g}\n+inf {self.pos_inf:.17g}\n")
        for x, m in zip(self.grid.centers, self.mass):
            if m > min_mass:
                buf.write(f"{x:.6f} {m:.17g}\n")
        return buf.getvalue()


def _unit(p: LlrDensity) -> LlrDensity:
    # rounding excess would otherwise compound geometrically across iterations
    t = p.total()
    return LlrDensity(p.grid, p.mass / t, p.pos_inf / t, p.neg_inf / t)


def _same_grid(p: LlrDensity, q: LlrDensity) -> None:
    if p.grid != q.grid:
        raise GridMismatchError(f"grid mismatch: {p.grid} vs {q.grid}")


def delta(grid: Grid, value: float) -> LlrDensity:
    """Unit mass at ``value`` (nearest bin), or at +-inf."""
    mass = np.zeros(grid.size)
    if value == math.inf:
        return LlrDensity(grid, mass, 1.0, 0.0)
    if value == -math.inf:
        return LlrDensity(grid, mass, 0.0, 1.0)
    k = int(round(value / grid.step))
    if abs(k) > grid.half_bins:
        return LlrDensity(grid, mass, float(k > 0), float(k < 0))
    mass[k + grid.half_bins] = 1.0
    return LlrDensity(grid, mass)


def channel_density_snr(s: float, grid: Grid = DEFAULT_GRID) -> LlrDensity:
    """Channel LLR density at per-block SNR ``s``: Normal(4s, 8s), bin-integrated."""
    if s <= 0:
        return delta(grid, 0.0)
    if math.isinf(s):
        return delta(grid, math.inf)
    mean, sd = 4.0 * s, math.sqrt(8.0 * s)
    c = grid.centers
    lo = (c - grid.step / 2 - mean) / sd
    hi = (c + grid.step / 2 - mean) / sd
    # integrate each bin on the tail side of the mean to keep small masses accurate
    mass = np.where(c < mean, special.ndtr(hi) - special.ndtr(lo), special.ndtr(-lo) - special.ndtr(-hi))
    edge = grid.half_range + grid.step / 2
    return _unit(LlrDensity(grid, np.maximum(mass, 0.0), float(special.ndtr((mean - edge) / sd)),
                      float(special.ndtr((-edge - mean) / sd))))


def channel_density(alpha: float, sigma2: float, grid: Grid = DEFAULT_GRID, es: float = 1.0) -> LlrDensity:
    """Density of ``(2/sigma^2)(a^2 Es + a sqrt(Es) z)``: mean 2a^2/sigma^2, variance 4a^2/sigma^2."""
    if alpha == math.inf:
        return delta(grid, math.inf)
    return channel_density_snr(alpha * alpha * es / (2.0 * sigma2), grid)


# ------------------------------------------------------------- operators

def conv_var(p: LlrDensity, q: LlrDensity) -> LlrDensity:
    """Density of the sum of independent LLRs."""
    _same_grid(p, q)
    M = p.grid.half_bins
    full = np.convolve(p.mass, q.mass)
    mass = full[M:M + p.grid.size].copy()
    pf, qf = p.mass.sum(), q.mass.sum()
    pos = p.pos_inf * (qf + q.pos_inf) + pf * q.pos_inf + full[M + p.grid.size:].sum()
    neg = p.neg_inf * (qf + q.neg_inf) + pf * q.neg_inf + full[:M].sum()
    # contradictory certainties cancel to an erasure
    mass[M] += p.pos_inf * q.neg_inf + p.neg_inf * q.pos_inf
    return _unit(LlrDensity(p.grid, mass, float(pos), float(neg)))


@lru_cache(maxsize=8)
def _check_table(grid: Grid) -> np.ndarray:
    """Output magnitude bin of the tanh rule for every pair of input magnitude bins."""
    a = np.arange(grid.half_bins + 1) * grid.step
    with np.errstate(divide="ignore"):
        phi = np.log1p(2.0 / np.expm1(a))
        out = np.log1p(2.0 / np.expm1(phi[:, None] + phi[None, :]))
    table = np.rint(out / grid.step).astype(np.int64)
    table.setflags(write=False)
    return table


@numba.njit(cache=True)
def _check_kernel(table, pp, pm, qp, qm, out_p, out_m):
    n = pp.shape[0]
    for a in range(n):
        pa, ma = pp[a], pm[a]
        if pa == 0.0 and ma == 0.0:
            continue
        row = table[a]
        for b in range(n):
            qb, nb = qp[b], qm[b]
            t = row[b]
            out_p[t] += pa * qb + ma * nb
            out_m[t] += pa * nb + ma * qb


def _split(p: LlrDensity):
    M = p.grid.half_bins
    pos = p.mass[M:].copy()
    neg = np.zeros(M + 1)
    neg[1:] = p.mass[M - 1::-1]
    return pos, neg


def _merge(grid: Grid, pos, neg) -> np.ndarray:
    M = grid.half_bins
    mass = np.empty(grid.size)
    mass[M:] = pos
    mass[:M] = neg[:0:-1]
    mass[M] += neg[0]
    return mass


def _check_finite(p: LlrDensity, q: LlrDensity, kernel: bool = True):
    pp, pm = _split(p)
    qp, qm = _split(q)
    n = pp.size
    if kernel:
        out_p, out_m = np.zeros(n), np.zeros(n)
        _check_kernel(_check_table(p.grid), pp, pm, qp, qm, out_p, out_m)
    else:
        t = _check_table(p.grid).ravel()
        same = (np.outer(pp, qp) + np.outer(pm, qm)).ravel()
        flip = (np.outer(pp, qm) + np.outer(pm, qp)).ravel()
        out_p = np.bincount(t, same, minlength=n)
        out_m = np.bincount(t, flip, minlength=n)
    return out_p, out_m


def conv_check(p: LlrDensity, q: LlrDensity, reference: bool = False) -> LlrDensity:
    """Density of ``2 atanh(tanh(X/2) tanh(Y/2))`` with nearest-bin assignment.

    ``reference=True`` uses the vectorised pairwise table instead of the
    compiled loop; both produce the same bins.
    """
    _same_grid(p, q)
    out_p, out_m = _check_finite(p, q, kernel=not reference)
    mass = _merge(p.grid, out_p, out_m)
    # an infinite input passes the other message through, possibly flipped
    mass += p.pos_inf * q.mass + p.neg_inf * q.mass[::-1]
    mass += q.pos_inf * p.mass + q.neg_inf * p.mass[::-1]
    pos = p.pos_inf * q.pos_inf + p.neg_inf * q.neg_inf
    neg = p.pos_inf * q.neg_inf + p.neg_inf * q.pos_inf
    return _unit(LlrDensity(p.grid, mass, float(pos), float(neg)))


def error_prob(p: LlrDensity) -> float:
    """Mass below zero plus half the zero bin plus the -inf mass."""
    M = p.grid.half_bins
    return float(p.mass[:M].sum() + 0.5 * p.mass[M] + p.neg_inf)


# ------------------------------------------------------------- mixtures

def mixture(weights, densities) -> LlrDensity:
    it = iter(zip(weights, densities))
    w, d = next(it)
    out = d.scaled(w)
    for w, d in it:
        out = out + d.scaled(w)
    return out


def powers(p: LlrDensity, top: int, op) -> list[LlrDensity]:
    """``[p^0, p^1, ..., p^top]`` built left to right, ``p^0`` the identity of ``op``."""
    ident = delta(p.grid, 0.0) if op is conv_var else delta(p.grid, math.inf)
    out = [ident]
    if top >= 1:
        out.append(p)
    for _ in range(2, top + 1):
        out.append(op(out[-1], p))
    return out


def _poly(coeffs: dict[int, float], pw: list[LlrDensity], shift: int) -> LlrDensity:
    return mixture([c for c in coeffs.values()], [pw[d - shift] for d in coeffs])


def mix_lambda(p, dd: DegreeDistribution, pw=None) -> LlrDensity:
    """``sum_i lambda_i p^{(x)(i-1)}``."""
    pw = pw or powers(p, dd.max_lambda_degree - 1, conv_var)
    return _poly(dd.lam, pw, 1)


def mix_lambda_tilde(p, dd: DegreeDistribution, pw=None) -> LlrDensity:
    """``lambda(x)/x``: one fewer factor per degree, edge weights unchanged."""
    pw = pw or powers(p, dd.max_lambda_degree - 1, conv_var)
    return _poly(dd.lam, pw, 2)


def mix_rho(p, dd: DegreeDistribution, pw=None) -> LlrDensity:
    pw = pw or powers(p, dd.max_rho_degree - 1, conv_check)
    return _poly(dd.rho, pw, 1)


def mix_rho_tilde(p, dd: DegreeDistribution, pw=None) -> LlrDensity:
    pw = pw or powers(p, dd.max_rho_degree - 1, conv_check)
    return _poly(dd.rho, pw, 2)


def _node_app(mu: LlrDensity, incoming: LlrDensity, dd: DegreeDistribution, extra: int,
              base: LlrDensity | None = None) -> LlrDensity:
    """A-posteriori density of a node of degree ``i`` seeing ``i - extra`` copies of ``incoming``."""
    pw = powers(incoming, dd.max_lambda_degree, conv_var)
    node = dd.node_lambda()
    tot = mixture(list(node.values()), [pw[i - extra] for i in node])
    out = conv_var(mu, tot)
    return conv_var(out, base) if base is not None else out


# ------------------------------------------------------------- root-LDPC recursion

@dataclass
class DeState:
    q1: LlrDensity
    q2: LlrDensity
    f1: LlrDensity
    f2: LlrDensity
    g1: LlrDensity
    g2: LlrDensity
    iteration: int = 0

    @classmethod
    def initial(cls, mu1: LlrDensity, mu2: LlrDensity) -> "DeState":
        return cls(mu1, mu2, mu1, mu2, mu1, mu2, 0)


@dataclass
class RootMessages:
    """Check-to-bit densities of one iteration: into 1i from a non-root check, and from its rootcheck."""
    into_1: LlrDensity
    root_1: LlrDensity
    into_2: LlrDensity
    root_2: LlrDensity


def _root_checks(state: DeState, dd: DegreeDistribution) -> RootMessages:
    fe, ge = (float(x) for x in multiedge_fraction(dd))
    h1 = mixture([fe, ge], [state.f1, state.g1])
    h2 = mixture([fe, ge], [state.f2, state.g2])
    top = dd.max_rho_degree - 1
    pw1 = powers(h1, top, conv_check)
    pw2 = powers(h2, top, conv_check)
    into_1 = conv_check(state.q2, mix_rho_tilde(h1, dd, pw1))
    into_2 = conv_check(state.q1, mix_rho_tilde(h2, dd, pw2))
    return RootMessages(into_1, mix_rho(h2, dd, pw2), into_2, mix_rho(h1, dd, pw1))


def de_step_root(state: DeState, mu1: LlrDensity, mu2: LlrDensity, dd: DegreeDistribution,
                 messages: RootMessages | None = None) -> DeState:
    """One flooding iteration of the six-density root-LDPC recursion.

    ``q`` is an information bit's message to its rootcheck, ``f`` its message
    to a non-root check and ``g`` a parity bit's message (always equal to ``q``).
    """
    m = messages or _root_checks(state, dd)
    top = dd.max_lambda_degree - 1
    pw1 = powers(m.into_1, top, conv_var)
    pw2 = powers(m.into_2, top, conv_var)
    q1 = conv_var(mu1, mix_lambda(m.into_1, dd, pw1))
    q2 = conv_var(mu2, mix_lambda(m.into_2, dd, pw2))
    f1 = conv_var(conv_var(mu1, mix_lambda_tilde(m.into_1, dd, pw1)), m.root_1)
    f2 = conv_var(conv_var(mu2, mix_lambda_tilde(m.into_2, dd, pw2)), m.root_2)
    return DeState(q1, q2, f1, f2, q1, q2, state.iteration + 1)


def root_app(messages: RootMessages, mu1, mu2, dd: DegreeDistribution) -> dict[str, LlrDensity]:
    """A-posteriori densities per column class given one round of check messages."""
    return {
        "1i": _node_app(mu1, messages.into_1, dd, 1, messages.root_1),
        "2i": _node_app(mu2, messages.into_2, dd, 1, messages.root_2),
        "1p": _node_app(mu1, messages.into_1, dd, 0),
        "2p": _node_app(mu2, messages.into_2, dd, 0),
    }


# ------------------------------------------------------------- classical recursion

def de_step_classical(p: list[LlrDensity], mus: list[LlrDensity], dd: DegreeDistribution):
    """Random ensemble with one channel density per block; returns (new messages, check message)."""
    w = 1.0 / len(p)
    c = mix_rho(mixture([w] * len(p), p), dd)
    lam = mix_lambda(c, dd)
    return [conv_var(mu, lam) for mu in mus], c


@dataclass
class DeOutcome:
    success: bool
    iterations: int
    error: float
    history: list[float] = field(default_factory=list)
    reason: str = ""


def _iterate(step, max_iter: int, target: float) -> DeOutcome:
    history = []
    prev = math.inf
    for it in range(1, max_iter + 1):
        err = step()
        history.append(err)
        if err < target:
            return DeOutcome(True, it, err, history, "converged")
        if prev - err < STALL_DECREASE:
            return DeOutcome(False, it, err, history, "stalled")
        prev = err
    return DeOutcome(False, max_iter, history[-1], history, "max_iter")


def run_de(dd: DegreeDistribution, root: bool, s1: float, s2: float, grid: Grid = DEFAULT_GRID,
           max_iter: int = MAX_ITER, target: float = SUCCESS_ERROR) -> DeOutcome:
    """DE at fixed per-block SNRs; the tracked error is the information-bit APP error."""
    mu1, mu2 = channel_density_snr(s1, grid), channel_density_snr(s2, grid)
    if root:
        box = {"state": DeState.initial(mu1, mu2)}

        def step():
            msgs = _root_checks(box["state"], dd)
            app = root_app(msgs, mu1, mu2, dd)
            box["state"] = de_step_root(box["state"], mu1, mu2, dd, msgs)
            return 0.5 * (error_prob(app["1i"]) + error_prob(app["2i"]))
    else:
        box = {"p": [mu1, mu2]}

        def step():
            box["p"], c = de_step_classical(box["p"], [mu1, mu2], dd)
            return 0.5 * (error_prob(_node_app(mu1, c, dd, 0)) + error_prob(_node_app(mu2, c, dd, 0)))
    return _iterate(step, max_iter, target)


def run_classical_awgn(dd: DegreeDistribution, s: float, grid: Grid = DEFAULT_GRID,
                       max_iter: int = MAX_ITER, target: float = SUCCESS_ERROR) -> DeOutcome:
    """Single-density recursion ``p <- mu (x) lambda(rho(p))``."""
    mu = channel_density_snr(s, grid)
    box = {"p": mu}

    def step():
        c = mix_rho(box["p"], dd)
        box["p"] = conv_var(mu, mix_lambda(c, dd))
        return error_prob(_node_app(mu, c, dd, 0))
    return _iterate(step, max_iter, target)


# ------------------------------------------------------------- thresholds

def snr_of_ebn0(ebn0_db: float, rate: float) -> float:
    return rate * 10.0 ** (ebn0_db / 10.0)


@dataclass(frozen=True)
class ThresholdReport:
    ebn0_db: float
    capacity_db: float
    bisection_steps: int

    @property
    def gap_db(self) -> float:
        return self.ebn0_db - self.capacity_db

    @property
    def ratio(self) -> float:
        """Fading-gain ratio from the threshold's distance to the capacity limit."""
        return threshold_ratio(self.ebn0_db, self.capacity_db)

    @property
    def ratio_gap_reading(self) -> float:
        """Same formula with the absolute threshold read as if it were the gap."""
        return math.sqrt(10.0 ** (self.ebn0_db / 10.0))


def threshold_ratio(threshold_ebn0_db: float, capacity_db: float | None = None, rate: float = 0.5) -> float:
    """``sqrt(Delta)``, Delta the linear ratio of the threshold to the BPSK capacity limit."""
    cap = capacity_limit_ebn0_db(rate) if capacity_db is None else capacity_db
    return math.sqrt(10.0 ** ((threshold_ebn0_db - cap) / 10.0))


def awgn_threshold(dd: DegreeDistribution, root: bool = False, grid: Grid = DEFAULT_GRID,
                   lo_db: float = -1.0, hi_db: float = 4.0, tol_db: float = 0.005,
                   max_iter: int = MAX_ITER) -> ThresholdReport:
    """Smallest Eb/N0 (dB) for which DE drives the APP error below the target."""
    rate = dd.design_rate()

    def ok(db):
        s = snr_of_ebn0(db, rate)
        res = run_de(dd, True, s, s, grid, max_iter) if root else run_classical_awgn(dd, s, grid, max_iter)
        return res.success

    if ok(lo_db) or not ok(hi_db):
        raise RuntimeError(f"threshold not bracketed by [{lo_db}, {hi_db}] dB")
    steps = 0
    while hi_db - lo_db > tol_db:
        mid = 0.5 * (lo_db + hi_db)
        if ok(mid):
            hi_db = mid
        else:
            lo_db = mid
        steps += 1
    return ThresholdReport(hi_db, capacity_limit_ebn0_db(rate), steps)


# ------------------------------------------------------------- fading WER

@dataclass
class Boundary:
    """Decoding boundary ``s2*(s1)``: DE succeeds iff ``s2 > s2*(s1)``.

    ``s1``/``s2`` hold the bisected points; ``inf`` marks an ``s1`` at which
    no ``s2`` suffices, ``0`` one at which the first block alone suffices.
    Both ensembles are symmetric under swapping the blocks, so each point is
    also used mirrored, which samples the steep part of the curve densely.
    """
    s1: np.ndarray
    s2: np.ndarray
    at_zero: float
    symmetric: bool = True

    def curve(self) -> tuple[np.ndarray, np.ndarray]:
        x, y = list(self.s1), list(self.s2)
        if self.symmetric:
            keep = np.isfinite(self.s2) & (self.s2 > 0)
            x += list(self.s2[keep])
            y += list(self.s1[keep])
        order = np.lexsort((-np.asarray(y), np.asarray(x)))
        x, y = np.asarray(x)[order], np.asarray(y)[order]
        # nonincreasing envelope, erring toward outage
        y = np.maximum.accumulate(y[::-1])[::-1]
        return x, y

    def __call__(self, s1) -> np.ndarray:
        v = np.atleast_1d(np.asarray(s1, dtype=float))
        x, y = self.curve()
        j = np.clip(np.searchsorted(x, v, side="right") - 1, 0, x.size - 1)
        out = y[j].copy()                     # step value, used where log-interp is undefined
        nxt = np.minimum(j + 1, x.size - 1)
        inner = (v > x[0]) & (v < x[-1]) & np.isfinite(y[j]) & (y[nxt] > 0) & (x[nxt] > x[j])
        if inner.any():
            jj, kk = j[inner], nxt[inner]
            t = np.log(v[inner] / x[jj]) / np.log(x[kk] / x[jj])
            out[inner] = np.exp(np.log(y[jj]) + t * np.log(y[kk] / y[jj]))
        out[v < x[0]] = self.at_zero
        out[v <= 0] = self.at_zero
        return out


def decoding_boundary(dd: DegreeDistribution, root: bool, s1_values=None, grid: Grid = DEFAULT_GRID,
                      rel_tol: float = 0.01, s_max: float = 1e3, max_iter: int = MAX_ITER) -> Boundary:
    """Bisect ``log s2`` at each ``s1``; outcomes are monotone in both block SNRs."""
    if s1_values is None:
        s1_values = np.geomspace(1e-3, 30.0, 14)
    s1_values = np.asarray(s1_values, dtype=float)

    def ok(a, b):
        return run_de(dd, root, a, b, grid, max_iter).success

    def solve(a, upper):
        if ok(a, 0.0):
            return 0.0
        if not ok(a, math.inf):
            return math.inf
        hi = min(upper, s_max)
        if not ok(a, hi):
            return hi if hi >= s_max else math.inf
        lo = hi
        while ok(a, lo) and lo > 1e-8:
            hi, lo = lo, lo / 4
        if lo <= 1e-8:
            return 0.0
        while math.log(hi / lo) > rel_tol:
            mid = math.sqrt(lo * hi)
            if ok(a, mid):
                hi = mid
            else:
                lo = mid
        return hi

    out = []
    upper = s_max
    for a in s1_values:
        b = solve(a, upper)
        out.append(b)
        if math.isfinite(b) and b > 0:
            upper = b * 1.05   # boundary is nonincreasing in s1
    return Boundary(s1_values, np.array(out), solve(0.0, s_max))


@dataclass(frozen=True)
class WerEstimate:
    ebn0_db: float
    wer: float
    ci_low: float
    ci_high: float
    samples: int


def de_asymptotic_wer(dd: DegreeDistribution, root: bool, ebn0_db, fading_samples: int = 10_000,
                      seed: int = 0, boundary: Boundary | None = None, mode: str = "rayleigh",
                      epsilon: float = 0.0, method: str = "conditional", grid: Grid = DEFAULT_GRID,
                      level: float = 0.99) -> list[WerEstimate]:
    """Probability that DE fails for a random fading draw.

    Rayleigh fading uses the decoding boundary: ``method='conditional'``
    samples the first block's gain and integrates the second exactly,
    ``'montecarlo'`` samples both gains, ``'quadrature'`` integrates both.
    Block erasures have four patterns, each decided by its own DE run.
    """
    rate = dd.design_rate()
    dbs = np.atleast_1d(np.asarray(ebn0_db, dtype=float))
    if mode == "erasure":
        wer = 0.0
        for a1 in (0.0, math.inf):
            for a2 in (0.0, math.inf):
                p = (epsilon if a1 == 0 else 1 - epsilon) * (epsilon if a2 == 0 else 1 - epsilon)
                if p > 0 and not run_de(dd, root, a1, a2, grid).success:
                    wer += p
        return [WerEstimate(float(d), wer, wer, wer, 0) for d in dbs]
    if mode != "rayleigh":
        raise ValueError(f"unsupported fading mode {mode!r}")
    bnd = boundary or decoding_boundary(dd, root, grid=grid)
    out = []
    for k, db in enumerate(dbs):
        gamma = snr_of_ebn0(db, rate)
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))
        if method == "quadrature":
            def f(x):
                return math.exp(-x) * -math.expm1(-float(bnd(gamma * x)[0]) / gamma)
            knots = sorted({0.0, *(bnd.s1 / gamma), 60.0})
            val = sum(integrate.quad(f, a, b, limit=200, epsabs=1e-16, epsrel=1e-9)[0]
                      for a, b in zip(knots[:-1], knots[1:]) if b > a)
            out.append(WerEstimate(float(db), val, val, val, 0))
            continue
        x1 = rng.exponential(size=fading_samples)
        need = bnd(gamma * x1)
        if method == "conditional":
            vals = -np.expm1(-need / gamma)
            m, lo, hi = mean_ci(vals, level)
        elif method == "montecarlo":
            x2 = rng.exponential(size=fading_samples)
            fails = int(np.sum(gamma * x2 <= need))
            m = fails / fading_samples
            lo, hi = binomial_ci(fails, fading_samples, level)
        else:
            raise ValueError(f"unknown method {method!r}")
        out.append(WerEstimate(float(db), float(m), float(lo), float(hi), fading_samples))
    return out


def wer_to_csv(rows: list[WerEstimate], header: str = "") -> str:
    buf = io.StringIO()
    for line in header.splitlines():
        buf.write(f"# {line}\n")
    buf.write("ebn0_db,wer,ci_low,ci_high,samples\n")
    for r in rows:
        buf.write(f"{r.ebn0_db:.6g},{r.wer:.6e},{r.ci_low:.6e},{r.ci_high:.6e},{r.samples}\n")
    return buf.getvalue()


def ergodic_snr(rate: float = 0.5) -> float:
    """Per-block SNR at which BPSK mutual information reaches the rate."""
    return inverse_mi(rate)
