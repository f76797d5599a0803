import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from rootldpc.construct import hamming_parity_matrix
from rootldpc.gf2 import (BinaryMatrix, BudgetExceededError, block_profile, code_rate,
                          diversity_analysis, enumerate_codewords, from_alist, kernel_basis,
                          rank, read_alist, singleton_bound, to_alist, write_alist)

bit_matrices = st.tuples(st.integers(1, 8), st.integers(1, 10)).flatmap(
    lambda s: arrays(np.uint8, s, elements=st.integers(0, 1)))


def test_rank_small_cases():
    assert rank(BinaryMatrix.identity(4)) == 4
    assert rank(BinaryMatrix.zeros(3, 5)) == 0
    assert rank(np.array([[1, 1], [1, 1]])) == 1


def test_binary_matrix_validates_and_is_immutable():
    with pytest.raises(ValueError):
        BinaryMatrix(np.array([[0, 2]]))
    with pytest.raises(ValueError):
        BinaryMatrix(np.zeros((0, 3)))
    M = BinaryMatrix(np.eye(3))
    with pytest.raises(ValueError):
        M.bits[0, 0] = 0


def test_enumerate_small_codes():
    words = enumerate_codewords(np.array([[1, 1]]))
    assert sorted(map(tuple, words)) == [(0, 0), (1, 1)]
    assert enumerate_codewords(np.eye(2, dtype=np.uint8)).tolist() == [[0, 0]]


def test_hamming_code_enumeration():
    words = enumerate_codewords(hamming_parity_matrix(3))
    assert words.shape == (16, 7)
    assert words[words.sum(axis=1) > 0].sum(axis=1).min() == 3


def test_budget_exceeded():
    with pytest.raises(BudgetExceededError):
        enumerate_codewords(BinaryMatrix.zeros(1, 30))


def test_block_profile_examples():
    assert block_profile([1, 1, 0, 0, 0, 0, 1, 1], 2).weights == (2, 2)
    assert block_profile([0] * 8, 2).weights == (0, 0)
    assert block_profile([1] + [0] * 7, 2).weights == (1, 0)
    with pytest.raises(ValueError):
        block_profile([1, 0, 1], 2)


def test_diversity_examples():
    rep = diversity_analysis(np.array([[1, 1]]), 2)
    assert (rep.d, rep.wstar) == (2, 1)
    # a codeword living on block 1 only
    assert diversity_analysis(np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]), 2).d == 1
    trivial = diversity_analysis(np.eye(4, dtype=np.uint8), 2)
    assert trivial.d == 2 and trivial.wstar == math.inf


def test_singleton_bound_examples():
    assert singleton_bound(0.5, 2) == 2
    assert singleton_bound(1 / 3, 3) == 3
    assert singleton_bound(1, 2) == 1


@given(bit_matrices)
def test_rank_bounded_and_kernel_dimension(bits):
    r = rank(bits)
    assert r <= min(bits.shape)
    K = kernel_basis(bits)
    assert K.shape[0] == bits.shape[1] - r
    assert not ((K.astype(int) @ bits.T.astype(int)) % 2).any()
    assert rank(K) == K.shape[0] if K.size else True


@given(bit_matrices, st.randoms(use_true_random=False))
def test_rank_invariant_under_row_operations(bits, rnd):
    b = bits.copy()
    rows = list(range(b.shape[0]))
    rnd.shuffle(rows)
    b = b[rows]
    if b.shape[0] > 1:
        i, j = rnd.sample(range(b.shape[0]), 2)
        b[i] ^= b[j]
    assert rank(b) == rank(bits)


@given(bit_matrices)
def test_codewords_satisfy_checks_and_respect_singleton(bits):
    H = BinaryMatrix(bits)
    words = enumerate_codewords(H)
    assert words.shape[0] == 2 ** (H.cols - rank(H))
    assert not H.syndrome(words).any()
    if H.cols % 2 == 0 and rank(H) < H.cols:
        rep = diversity_analysis(H, 2)
        assert rep.d <= singleton_bound(code_rate(H), 2)


@given(bit_matrices)
def test_alist_round_trip(bits):
    H = BinaryMatrix(bits)
    assert from_alist(to_alist(H)) == H


def test_alist_file_round_trip(tmp_path):
    H = BinaryMatrix(hamming_parity_matrix(3))
    write_alist(H, tmp_path / "h.alist")
    assert read_alist(tmp_path / "h.alist") == H


def test_alist_rejects_inconsistent_lists():
    text = to_alist(BinaryMatrix(np.array([[1, 0], [0, 1]]))).splitlines()
    text[-1] = "1"
    with pytest.raises(ValueError):
        from_alist("\n".join(text))
