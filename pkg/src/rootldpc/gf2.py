"""GF(2) matrices, kernels and brute-force blockwise-weight oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

DEFAULT_ENUM_BUDGET_LOG2 = 24


class BudgetExceededError(ValueError):
    """Raised when an exhaustive enumeration would exceed its budget."""


@dataclass(frozen=True, eq=False)
class BinaryMatrix:
    """Immutable dense bit matrix.

    ``bits`` is a read-only ``uint8`` array of shape ``(rows, cols)``.
    """

    bits: np.ndarray

    def __post_init__(self):
        arr = np.array(self.bits, dtype=np.uint8, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty 2-D array, got shape {arr.shape}")
        if np.any(arr > 1):
            raise ValueError("entries must be 0 or 1")
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BinaryMatrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> "BinaryMatrix":
        return cls(np.eye(n, dtype=np.uint8))

    @property
    def rows(self) -> int:
        return self.bits.shape[0]

    @property
    def cols(self) -> int:
        return self.bits.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def column_weights(self) -> np.ndarray:
        return self.bits.sum(axis=0, dtype=np.int64)

    def row_weights(self) -> np.ndarray:
        return self.bits.sum(axis=1, dtype=np.int64)

    def columns(self, idx) -> "BinaryMatrix":
        return BinaryMatrix(self.bits[:, idx])

    def syndrome(self, word: np.ndarray) -> np.ndarray:
        """H @ word over GF(2); ``word`` may be a vector or a stack of rows."""
        w = np.asarray(word, dtype=np.int64)
        return (w @ self.bits.T.astype(np.int64)) % 2

    def packed_rows(self) -> list[int]:
        """Each row as a Python int, bit ``j`` holding column ``j``."""
        return _pack_rows(self.bits)

    def __eq__(self, other):
        return isinstance(other, BinaryMatrix) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.shape, self.bits.tobytes()))

    def __repr__(self):
        return f"BinaryMatrix({self.rows}x{self.cols}, edges={int(self.bits.sum())})"


@dataclass(frozen=True)
class BlockProfile:
    nc: int
    weights: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.weights)

    @property
    def nonzero_blocks(self) -> int:
        return sum(1 for w in self.weights if w)


@dataclass(frozen=True)
class DiversityReport:
    d: int
    # math.inf for the trivial code, which has no nonzero codeword
    wstar: int | float
    n_codewords: int


def _as_bits(M) -> np.ndarray:
    return M.bits if isinstance(M, BinaryMatrix) else np.asarray(M, dtype=np.uint8)


def _pack_rows(bits: np.ndarray) -> list[int]:
    packed = np.packbits(bits.astype(np.uint8), axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def rank(M) -> int:
    """GF(2) rank by elimination on word-packed rows."""
    pivots: dict[int, int] = {}
    for r in _pack_rows(_as_bits(M)):
        while r:
            top = r.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = r
                break
            r ^= p
    return len(pivots)


def kernel_basis(M) -> np.ndarray:
    """Basis of the right null space, one basis vector per row."""
    a = _as_bits(M).astype(bool).copy()
    n_rows, n = a.shape
    pivot_cols = []
    r = 0
    for c in range(n):
        if r == n_rows:
            break
        hits = np.flatnonzero(a[r:, c])
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        a[others] ^= a[r]
        pivot_cols.append(c)
        r += 1
    pivot_set = set(pivot_cols)
    free = [c for c in range(n) if c not in pivot_set]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivot_cols):
            if a[i, f]:
                basis[k, pc] = 1
    return basis


def iter_codewords(H, budget_log2: int = DEFAULT_ENUM_BUDGET_LOG2,
                   chunk: int = 1 << 14) -> Iterator[np.ndarray]:
    """Yield the code's codewords in chunks of rows (zero word first)."""
    basis = kernel_basis(H)
    k = basis.shape[0]
    if k > budget_log2:
        raise BudgetExceededError(f"kernel dimension {k} exceeds budget 2^{budget_log2}")
    total = 1 << k
    shifts = np.arange(k, dtype=np.int64)
    b = basis.astype(np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        coeffs = (idx[:, None] >> shifts) & 1
        yield ((coeffs @ b) % 2).astype(np.uint8)


def enumerate_codewords(H, budget_log2: int = DEFAULT_ENUM_BUDGET_LOG2) -> np.ndarray:
    """All ``2**(N - rank)`` codewords as rows of a ``uint8`` array."""
    return np.concatenate(list(iter_codewords(H, budget_log2)), axis=0)


def _block_slices(n: int, nc: int) -> int:
    if nc < 1 or n % nc:
        raise ValueError(f"length {n} is not divisible by nc={nc}")
    return n // nc


def block_weights(words: np.ndarray, nc: int) -> np.ndarray:
    """Blockwise Hamming weights for a stack of words, shape (M, nc)."""
    w = np.atleast_2d(np.asarray(words))
    ell = _block_slices(w.shape[1], nc)
    return w.reshape(w.shape[0], nc, ell).sum(axis=2, dtype=np.int64)


def block_profile(c: Sequence[int], nc: int) -> BlockProfile:
    """Hamming weight of each of the ``nc`` contiguous blocks of ``c``."""
    weights = block_weights(np.asarray(c, dtype=np.uint8)[None, :], nc)[0]
    return BlockProfile(nc, tuple(int(x) for x in weights))


def diversity_analysis(H, nc: int, budget_log2: int = DEFAULT_ENUM_BUDGET_LOG2) -> DiversityReport:
    """Block diversity ``d`` and minimum blockwise weight by enumeration."""
    d = nc
    wstar: int | float = math.inf
    count = 0
    for words in iter_codewords(H, budget_log2):
        count += words.shape[0]
        bw = block_weights(words, nc)
        bw = bw[bw.sum(axis=1) > 0]
        if bw.size == 0:
            continue
        d = min(d, int((bw > 0).sum(axis=1).min()))
        wstar = min(wstar, int(bw.min()))
    return DiversityReport(d=d, wstar=wstar, n_codewords=count)


def singleton_bound(rate, nc: int) -> int:
    """Blockwise Singleton bound ``1 + floor(nc (1 - R))``."""
    r = Fraction(rate).limit_denominator(10**9)
    if not 0 < r <= 1:
        raise ValueError("rate must lie in (0, 1]")
    return 1 + math.floor(nc * (1 - r))


def code_rate(H) -> Fraction:
    bits = _as_bits(H)
    return 1 - Fraction(rank(bits), bits.shape[1])


# ---------------------------------------------------------------- alist I/O

def to_alist(H) -> str:
    """Serialize to MacKay alist text (1-based indices, zero padded)."""
    bits = _as_bits(H)
    m, n = bits.shape
    col_lists = [np.flatnonzero(bits[:, j]) + 1 for j in range(n)]
    row_lists = [np.flatnonzero(bits[i, :]) + 1 for i in range(m)]
    max_c = max((len(c) for c in col_lists), default=0)
    max_r = max((len(r) for r in row_lists), default=0)

    def pad(lst, width):
        vals = list(lst) + [0] * (width - len(lst))
        return " ".join(str(int(v)) for v in vals)

    lines = [f"{n} {m}", f"{max_c} {max_r}",
             " ".join(str(len(c)) for c in col_lists),
             " ".join(str(len(r)) for r in row_lists)]
    # an empty index list is written as a lone 0 so no line is blank
    lines += [pad(c, max(max_c, 1)) for c in col_lists]
    lines += [pad(r, max(max_r, 1)) for r in row_lists]
    return "\n".join(lines) + "\n"


def from_alist(text: str) -> BinaryMatrix:
    """Parse alist text; accepts both zero-padded and unpadded index lists."""
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    n, m = int(lines[0][0]), int(lines[0][1])
    col_deg = [int(x) for x in lines[2]]
    row_deg = [int(x) for x in lines[3]]
    if len(col_deg) != n or len(row_deg) != m:
        raise ValueError("alist degree lists do not match the header dimensions")
    bits = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        idx = [int(x) for x in lines[4 + j] if int(x) > 0]
        if len(idx) != col_deg[j]:
            raise ValueError(f"column {j + 1}: expected {col_deg[j]} entries, got {len(idx)}")
        bits[np.array(idx, dtype=int) - 1, j] = 1
    for i in range(m):
        idx = [int(x) for x in lines[4 + n + i] if int(x) > 0]
        row = np.zeros(n, dtype=np.uint8)
        row[np.array(idx, dtype=int) - 1] = 1
        if not np.array_equal(row, bits[i]):
            raise ValueError(f"row {i + 1} disagrees with the column lists")
    return BinaryMatrix(bits)


def read_alist(path) -> BinaryMatrix:
    with open(path, encoding="utf-8") as f:
        return from_alist(f.read())


def write_alist(H, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(to_alist(H))
