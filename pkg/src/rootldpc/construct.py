"""Code families for the two-block fading channel.

ML-designed matrices with full-rank halves, random regular LDPC baselines,
and root-LDPC codes whose information bits each own a rootcheck.

Root-code column order is ``[1i | 1p | 2i | 2p]`` and row order is
``[1c | 2c]``, each group holding ``N/4`` members, so the first half of
the word rides on fading block 1 and the second half on block 2.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .gf2 import BinaryMatrix, rank, to_alist

log = logging.getLogger(__name__)

COLUMN_CLASSES = ("1i", "1p", "2i", "2p")
CHECK_CLASSES = ("1c", "2c")


class InfeasibleParametersError(ValueError):
    pass


class UnrealizableDistributionError(ValueError):
    pass


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class DegreeDistribution:
    """Edge-perspective variable (``lam``) and check (``rho``) degree fractions."""

    lam: Mapping[int, float]
    rho: Mapping[int, float]
    tol: float = field(default=1e-12, compare=False)

    def __post_init__(self):
        lam = {int(k): float(v) for k, v in sorted(dict(self.lam).items()) if v}
        rho = {int(k): float(v) for k, v in sorted(dict(self.rho).items()) if v}
        for name, dist in (("lambda", lam), ("rho", rho)):
            if not dist:
                raise ValueError(f"{name} is empty")
            if any(v < 0 or v > 1 for v in dist.values()):
                raise ValueError(f"{name} fractions must lie in [0, 1]")
            if abs(sum(dist.values()) - 1.0) > self.tol:
                raise ValueError(f"{name} sums to {sum(dist.values())!r}, not 1")
        if min(rho) < 2:
            raise ValueError("check degrees must be at least 2")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def regular(cls, dv: int, dc: int) -> "DegreeDistribution":
        return cls({dv: 1.0}, {dc: 1.0})

    @classmethod
    def from_coefficients(cls, lam_coeffs: Mapping[int, float], rho_coeffs: Mapping[int, float],
                          tol: float = 1e-4) -> "DegreeDistribution":
        """Build from polynomial coefficients keyed by *exponent* (degree - 1).

        Published coefficient lists are rounded, so their sums are renormalised
        after checking they are within ``tol`` of one.
        """
        def norm(coeffs):
            total = sum(coeffs.values())
            if abs(total - 1) > tol:
                raise ValueError(f"coefficients sum to {total}")
            return {int(e) + 1: v / total for e, v in coeffs.items()}
        return cls(norm(lam_coeffs), norm(rho_coeffs))

    @property
    def max_lambda_degree(self) -> int:
        return max(self.lam)

    @property
    def max_rho_degree(self) -> int:
        return max(self.rho)

    def design_rate(self) -> float:
        return 1.0 - (sum(v / j for j, v in self.rho.items())
                      / sum(v / i for i, v in self.lam.items()))

    def node_lambda(self) -> dict[int, float]:
        """Node-perspective variable degree fractions."""
        z = sum(v / i for i, v in self.lam.items())
        return {i: (v / i) / z for i, v in self.lam.items()}

    def node_rho(self) -> dict[int, float]:
        z = sum(v / j for j, v in self.rho.items())
        return {j: (v / j) / z for j, v in self.rho.items()}

    def is_regular(self) -> bool:
        return len(self.lam) == 1 and len(self.rho) == 1


# Irregular pair used for the ergodic-threshold comparison (rate 1/2, max left degree 12).
IRREGULAR_RATE_HALF = DegreeDistribution.from_coefficients(
    {1: 0.24426, 2: 0.25907, 3: 0.01054, 4: 0.05510, 7: 0.01455, 9: 0.01275, 11: 0.40373},
    {6: 0.25475, 7: 0.73438, 8: 0.01087},
)
REGULAR_36 = DegreeDistribution.regular(3, 6)


def multiedge_fraction(dd: DegreeDistribution) -> tuple[Fraction, Fraction]:
    """Fractions ``(f_e, g_e)`` of non-root check edges fed by information / parity bits.

    Evaluated in exact rational arithmetic on the decimal coefficients.
    """
    if min(dd.lam) < 2:
        raise ValueError("degree-1 variable nodes are not allowed")
    lam = {i: _as_fraction(v) for i, v in dd.lam.items()}
    a = sum(v / i for i, v in lam.items())
    b = sum(v / (i - 1) for i, v in lam.items())
    fe = a / (a + b)
    return fe, 1 - fe


# ------------------------------------------------------------ random sparse

def _socket_match(var_deg: np.ndarray, chk_deg: np.ndarray, rng: np.random.Generator,
                  max_rounds: int = 1000) -> np.ndarray:
    """Random bipartite graph with prescribed degrees and no parallel edges.

    Returns a ``(n_chk, n_var)`` 0/1 array. Parallel edges are redrawn by
    swapping check sockets with randomly chosen edges.
    """
    var_sock = np.repeat(np.arange(var_deg.size), var_deg)
    chk_sock = np.repeat(np.arange(chk_deg.size), chk_deg)
    if var_sock.size != chk_sock.size:
        raise InfeasibleParametersError(
            f"socket counts differ: {var_sock.size} variable vs {chk_sock.size} check")
    chk_sock = rng.permutation(chk_sock)
    n_var = var_deg.size
    for _ in range(max_rounds):
        key = chk_sock.astype(np.int64) * n_var + var_sock
        order = np.argsort(key, kind="stable")
        dup = order[1:][key[order[1:]] == key[order[:-1]]]
        if dup.size == 0:
            H = np.zeros((chk_deg.size, n_var), dtype=np.uint8)
            H[chk_sock, var_sock] = 1
            return H
        partners = rng.integers(0, chk_sock.size, size=dup.size)
        for e, f in zip(dup, partners):
            chk_sock[e], chk_sock[f] = chk_sock[f], chk_sock[e]
    raise InfeasibleParametersError("could not remove parallel edges")


def random_regular_ldpc(N: int, dv: int, dc: int, seed=None) -> BinaryMatrix:
    """Random (dv, dc)-regular parity-check matrix of size ``N*dv/dc x N``."""
    if N < 1 or dv < 1 or dc < 1 or (N * dv) % dc or dc > N:
        raise InfeasibleParametersError(f"no ({dv},{dc}) regular matrix with N={N}")
    L = N * dv // dc
    if dv > L:
        raise InfeasibleParametersError(f"column weight {dv} exceeds {L} rows")
    rng = np.random.default_rng(seed)
    return BinaryMatrix(_socket_match(np.full(N, dv), np.full(L, dc), rng))


def random_permutation_sum(n: int, w: int, rng: np.random.Generator,
                           max_tries: int = 10000) -> np.ndarray:
    """n x n matrix with row and column weight ``w``: a sum of ``w`` disjoint permutations."""
    if w > n:
        raise InfeasibleParametersError(f"weight {w} exceeds size {n}")
    M = np.zeros((n, n), dtype=np.uint8)
    rows = np.arange(n)
    for _ in range(w):
        for _ in range(max_tries):
            perm = rng.permutation(n)
            if not M[rows, perm].any():
                M[rows, perm] = 1
                break
        else:
            # rejection failed; fall back to a matching on the free cells
            perm = _free_matching(M, rng)
            M[rows, perm] = 1
    return M


def _free_matching(M: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    from scipy.optimize import linear_sum_assignment
    cost = M.astype(float) * 1e6 + rng.random(M.shape)
    r, c = linear_sum_assignment(cost)
    if M[r, c].any():
        raise InfeasibleParametersError("no disjoint permutation left")
    return c[np.argsort(r)]


def count_four_cycles(H) -> int:
    """Number of column pairs sharing two or more checks."""
    bits = H.bits if isinstance(H, BinaryMatrix) else np.asarray(H)
    from scipy import sparse
    S = sparse.csc_matrix(bits.astype(np.int32))
    overlap = (S.T @ S).tocoo()
    mask = (overlap.row < overlap.col) & (overlap.data >= 2)
    return int(mask.sum())


# ----------------------------------------------------------- ML designs

def is_ml_full_diversity(H, nc: int) -> bool:
    """True iff every union of ``nc - 1`` column blocks has full column rank."""
    bits = H.bits if isinstance(H, BinaryMatrix) else np.asarray(H, dtype=np.uint8)
    if nc < 2:
        raise ValueError(f"unsupported number of blocks nc={nc}")
    n = bits.shape[1]
    if n % nc:
        raise ValueError(f"N={n} not divisible by nc={nc}")
    ell = n // nc
    for skip in range(nc):
        cols = np.concatenate([np.arange(j * ell, (j + 1) * ell) for j in range(nc) if j != skip])
        if rank(bits[:, cols]) < cols.size:
            return False
    return True


def build_wstar2(N: int) -> BinaryMatrix:
    """Rate ``1/2 - 1/N`` full-diversity matrix with minimum blockwise weight 2.

    Top rows are ``[A | I]``; ``A`` has an all-zero first column followed by
    adjacent-pair columns ``e_{j-1} + e_j``. The extra bottom row is all-ones
    over the left half.
    """
    if N < 8 or N % 2:
        raise InfeasibleParametersError("N must be even and at least 8")
    h = N // 2
    A = np.zeros((h, h), dtype=np.uint8)
    for j in range(1, h):
        A[j - 1, j] = 1
        A[j, j] = 1
    top = np.hstack([A, np.eye(h, dtype=np.uint8)])
    bottom = np.concatenate([np.ones(h, dtype=np.uint8), np.zeros(h, dtype=np.uint8)])
    return BinaryMatrix(np.vstack([top, bottom]))


def hamming_parity_matrix(m: int) -> np.ndarray:
    """m x (2^m - 1) parity-check matrix whose columns are 1..2^m-1 in binary."""
    cols = np.arange(1, 2 ** m)
    return ((cols[None, :] >> np.arange(m)[:, None]) & 1).astype(np.uint8)


def build_wstar3(m: int, seed: int = 0, col_weight: int = 3, max_tries: int = 10000) -> BinaryMatrix:
    """Full-diversity matrix with minimum blockwise weight >= 3, length ``2(2^m-1)``.

    Stacks a rate-1/2 base ``[H1 | I]`` on Hamming checks over each half.
    ``H1`` is a sparse full-rank matrix drawn until the stack has full row
    rank, giving rate ``1/2 - 2m/N``.
    """
    if m < 3:
        raise InfeasibleParametersError("m must be at least 3")
    h = 2 ** m - 1
    ham = hamming_parity_matrix(m)
    zeros = np.zeros_like(ham)
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        H1 = np.zeros((h, h), dtype=np.uint8)
        for j in range(h):
            H1[rng.choice(h, size=col_weight, replace=False), j] = 1
        if rank(H1) < h:
            continue
        H = np.vstack([np.hstack([H1, np.eye(h, dtype=np.uint8)]),
                       np.hstack([ham, zeros]),
                       np.hstack([zeros, ham])])
        if rank(H) == H.shape[0]:
            return BinaryMatrix(H)
    raise InfeasibleParametersError("no admissible left block found")


def random_full_diversity_half_rate(N: int, seed=None, density: float = 0.5,
                                    max_tries: int = 1000) -> BinaryMatrix:
    """Random ``N/2 x N`` matrix whose two halves are both full rank."""
    if N % 2:
        raise InfeasibleParametersError("N must be even")
    rng = np.random.default_rng(seed)
    h = N // 2
    for _ in range(max_tries):
        bits = (rng.random((h, N)) < density).astype(np.uint8)
        if rank(bits[:, :h]) == h and rank(bits[:, h:]) == h:
            return BinaryMatrix(bits)
    raise InfeasibleParametersError("no full-rank halves found")


# ------------------------------------------------------------ root-LDPC

@dataclass(frozen=True, eq=False)
class RootLdpcCode:
    H: BinaryMatrix
    column_class: tuple[str, ...]
    check_class: tuple[str, ...]
    block_of_column: tuple[int, ...]
    dd: DegreeDistribution | None = None

    @property
    def N(self) -> int:
        return self.H.cols

    @property
    def nc(self) -> int:
        return 2

    def columns_of(self, cls: str) -> np.ndarray:
        return np.array([i for i, c in enumerate(self.column_class) if c == cls], dtype=np.int64)

    def rows_of(self, cls: str) -> np.ndarray:
        return np.array([i for i, c in enumerate(self.check_class) if c == cls], dtype=np.int64)

    @property
    def info_positions(self) -> np.ndarray:
        return np.flatnonzero([c.endswith("i") for c in self.column_class])

    def submatrix(self, check_cls: str, col_cls: str) -> np.ndarray:
        return self.H.bits[np.ix_(self.rows_of(check_cls), self.columns_of(col_cls))]

    def realized_distribution(self) -> DegreeDistribution:
        return realized_distribution(self.H)

    def metadata(self) -> dict:
        return {
            "family": "root-ldpc",
            "N": self.N,
            "rows": self.H.rows,
            "nc": 2,
            "column_class": list(self.column_class),
            "check_class": list(self.check_class),
            "block_of_column": list(self.block_of_column),
        }

    def save(self, alist_path, meta_path) -> None:
        with open(alist_path, "w", encoding="utf-8") as f:
            f.write(to_alist(self.H))
        with open(meta_path, "w", encoding="utf-8") as f:
            json.dump(self.metadata(), f, indent=1)
            f.write("\n")


def realized_distribution(H) -> DegreeDistribution:
    bits = H.bits if isinstance(H, BinaryMatrix) else np.asarray(H)
    cw = bits.sum(axis=0)
    rw = bits.sum(axis=1)
    E = float(cw.sum())
    lam = {int(d): float((cw == d).sum() * d / E) for d in np.unique(cw) if d > 0}
    rho = {int(d): float((rw == d).sum() * d / E) for d in np.unique(rw) if d > 0}
    return DegreeDistribution(lam, rho, tol=1e-9)


def _class_layout(n4: int):
    column_class = tuple(c for c in COLUMN_CLASSES for _ in range(n4))
    check_class = tuple(c for c in CHECK_CLASSES for _ in range(n4))
    block_of_column = tuple(1 if c.startswith("1") else 2 for c in column_class)
    return column_class, check_class, block_of_column


def _assemble_root(n4, H1i, H1p, H2i, H2p) -> np.ndarray:
    I = np.eye(n4, dtype=np.uint8)
    Z = np.zeros((n4, n4), dtype=np.uint8)
    top = np.hstack([I, Z, H2i, H2p])      # rootchecks of the 1i bits
    bottom = np.hstack([H1i, H1p, I, Z])   # rootchecks of the 2i bits
    return np.vstack([top, bottom])


def build_root_regular(N: int, seed=None, cycle_retries: int = 20) -> RootLdpcCode:
    """Regular (3,6) root-LDPC code of rate 1/2."""
    if N % 4:
        raise InfeasibleParametersError("N must be divisible by 4")
    n4 = N // 4
    if n4 < 3:
        raise InfeasibleParametersError("N must be at least 12")
    rng = np.random.default_rng(seed)
    best, best_cycles = None, None
    for _ in range(max(1, cycle_retries)):
        blocks = [random_permutation_sum(n4, w, rng) for w in (2, 3, 2, 3)]
        H = _assemble_root(n4, *blocks)
        cycles = count_four_cycles(H)
        if best is None or cycles < best_cycles:
            best, best_cycles = H, cycles
        if cycles == 0:
            break
    if best_cycles:
        log.info("root code N=%d keeps %d four-cycles after %d draws", N, best_cycles, cycle_retries)
    return RootLdpcCode(BinaryMatrix(best), *_class_layout(n4), dd=REGULAR_36)


def _apportion(total: int, fractions: Mapping[int, float]) -> dict[int, int]:
    """Largest-remainder rounding of ``total * fractions`` to integers summing to ``total``."""
    keys = list(fractions)
    raw = np.array([total * fractions[k] for k in keys])
    base = np.floor(raw).astype(int)
    short = total - int(base.sum())
    order = np.argsort(-(raw - base), kind="stable")
    base[order[:short]] += 1
    return {k: int(b) for k, b in zip(keys, base)}


def _degree_sequence(counts: Mapping[int, int], rng: np.random.Generator) -> np.ndarray:
    seq = np.concatenate([np.full(c, d, dtype=np.int64) for d, c in sorted(counts.items()) if c])
    return rng.permutation(seq)


def _balance_checks(chk_deg: np.ndarray, target: int) -> np.ndarray:
    """Nudge check socket counts by +-1 until they sum to ``target``."""
    chk_deg = chk_deg.copy()
    diff = target - int(chk_deg.sum())
    order = np.argsort(chk_deg, kind="stable")
    i = 0
    while diff:
        if diff > 0:
            chk_deg[order[i % chk_deg.size]] += 1
            diff -= 1
        else:
            j = order[::-1][i % chk_deg.size]
            if chk_deg[j] > 1:
                chk_deg[j] -= 1
                diff += 1
        i += 1
    return chk_deg


def build_root_irregular(N: int, dd: DegreeDistribution, seed=None) -> RootLdpcCode:
    """Root-LDPC code with irregular non-root sub-matrices.

    Bit and check degrees are apportioned per class from the node-perspective
    fractions of ``dd``. Each information bit of degree ``i`` spends one edge on
    its rootcheck, so ``i - 1`` sockets remain; each check of degree ``j`` spends
    one on the identity, leaving ``j - 1``.
    """
    if N % 4:
        raise InfeasibleParametersError("N must be divisible by 4")
    n4 = N // 4
    if min(dd.lam) < 2:
        raise UnrealizableDistributionError("information bits need degree >= 2")
    rng = np.random.default_rng(seed)
    node_lam = dd.node_lambda()
    node_rho = dd.node_rho()
    halves = {}
    for side in (1, 2):
        info_deg = _degree_sequence(_apportion(n4, node_lam), rng)
        par_deg = _degree_sequence(_apportion(n4, node_lam), rng)
        chk_deg = _degree_sequence(_apportion(n4, node_rho), rng) - 1
        var_sockets = np.concatenate([info_deg - 1, par_deg])
        slack = len(dd.lam) + len(dd.rho) + 0.02 * var_sockets.sum()
        if abs(int(chk_deg.sum()) - int(var_sockets.sum())) > slack:
            raise UnrealizableDistributionError(
                f"edge counts {var_sockets.sum()} vs {chk_deg.sum()} cannot be reconciled")
        chk_deg = _balance_checks(chk_deg, int(var_sockets.sum()))
        if chk_deg.max() > 2 * n4:
            raise UnrealizableDistributionError("check degree exceeds available bits")
        # rows: the checks of the opposite class; columns: [info | parity] of this side
        halves[side] = _socket_match(var_sockets, chk_deg, rng)
    H1i, H1p = halves[1][:, :n4], halves[1][:, n4:]
    H2i, H2p = halves[2][:, :n4], halves[2][:, n4:]
    H = _assemble_root(n4, H1i, H1p, H2i, H2p)
    return RootLdpcCode(BinaryMatrix(H), *_class_layout(n4), dd=dd)


def load_root_metadata(meta_path, H: BinaryMatrix) -> RootLdpcCode:
    with open(meta_path, encoding="utf-8") as f:
        meta = json.load(f)
    return RootLdpcCode(H, tuple(meta["column_class"]), tuple(meta["check_class"]),
                        tuple(int(b) for b in meta["block_of_column"]))


def ml_rate_wstar3(m: int) -> float:
    N = 2 * (2 ** m - 1)
    return 0.5 - (2.0 / N) * math.log2(N / 2 + 1)
