import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rootldpc.channel import LLR_MAX, ChannelConfig, FadingRealization, transmit
from rootldpc.construct import build_wstar2
from rootldpc.decoder import (DecoderConfig, StopRule, check_update_bp, check_update_minsum,
                              decode, decode_batch, decode_ml_exhaustive, decode_peeling,
                              random_codeword, simulate_point, simulate_wer, tanner_graph)
from rootldpc.gf2 import BinaryMatrix
from rootldpc.stats import loglog_slope

llrs = st.floats(-40, 40, allow_nan=False)


def test_check_bp_examples():
    assert check_update_bp([LLR_MAX, 1.7]) == pytest.approx(1.7, abs=1e-9)
    assert check_update_bp([0.0, 3.0]) == 0.0
    assert check_update_bp([2.0, -3.0]) == pytest.approx(2 * math.atanh(math.tanh(1) * math.tanh(-1.5)), rel=1e-12)


def test_check_minsum_examples():
    assert check_update_minsum([2.0, -3.0]) == -2.0
    assert check_update_minsum([1, 2, 3, 4, 5]) == 1.0


@given(st.lists(llrs, min_size=1, max_size=8))
def test_minsum_dominates_bp(xs):
    assert abs(check_update_minsum(xs)) >= abs(check_update_bp(xs)) - 1e-9


@given(st.lists(st.floats(-15, 15), min_size=1, max_size=6))
def test_bp_matches_tanh_rule(xs):
    ref = np.prod(np.tanh(np.array(xs) / 2))
    ref = 2 * math.atanh(ref) if abs(ref) < 1 - 1e-15 else math.copysign(LLR_MAX, ref)
    assert check_update_bp(xs) == pytest.approx(ref, abs=1e-6)


def test_decoder_config_validation():
    with pytest.raises(ValueError):
        DecoderConfig(max_iter=0)
    with pytest.raises(ValueError):
        DecoderConfig(llr_clip=LLR_MAX + 1)
    with pytest.raises(ValueError):
        DecoderConfig(variant="layered")


def test_noiseless_all_zero(root400):
    res = decode(root400, np.full(root400.N, 8.0))
    assert res.converged and res.iterations_used <= 1 and not res.word_error


def test_dimension_mismatch(root16):
    with pytest.raises(ValueError):
        decode(root16, np.zeros(5))


@pytest.mark.parametrize("variant", ["bp", "min-sum"])
def test_erased_block_recovered_by_rootchecks(root400, variant):
    llr = np.concatenate([np.zeros(200), np.full(200, LLR_MAX)])
    res = decode(root400, llr, DecoderConfig(variant=variant))
    assert not res.info_error
    assert not res.hard_bits[root400.columns_of("1i")].any()


def test_both_blocks_erased_is_info_error(root400):
    assert decode(root400, np.zeros(400)).info_error


def test_peeling_examples(root400, random400):
    assert decode_peeling(root400, np.zeros(400, bool)).converged
    mask = np.zeros(400, bool)
    mask[200:] = True
    res = decode_peeling(root400, mask)
    assert not res.info_error and res.residual_by_class["1i"] == 0
    # random (3,6): half the bits erased is beyond the erasure threshold
    assert decode_peeling(random400, mask).word_error


@given(st.integers(0, 2 ** 32 - 1))
def test_converged_implies_zero_syndrome(seed):
    code = build_wstar2(12)
    r = np.random.default_rng(seed)
    llr = r.normal(1.0, 2.0, size=(4, 12))
    res = decode_batch(code, llr, DecoderConfig(max_iter=20))
    ok = tanner_graph(code).syndrome_ok(res.hard_bits)
    assert (ok[res.converged]).all()


def test_decode_against_random_codeword(root400, rng):
    c = random_codeword(root400, rng)
    fr = FadingRealization(np.array([1.0, 1.0]))
    w = transmit(c, fr, 0.3, rng)
    from rootldpc.channel import channel_llr
    res = decode(root400, channel_llr(w), transmitted=c)
    assert np.array_equal(res.hard_bits, c)


def test_ml_noiseless_returns_codeword(rng):
    H = build_wstar2(12)
    c = random_codeword(H, rng)
    w = transmit(c, FadingRealization(np.array([0.8, 1.3])), 0.0, rng)
    w = type(w)(w.y, w.fading, 0.1)
    res = decode_ml_exhaustive(H, w)
    assert np.array_equal(res.hard_bits, c)


def test_ml_agrees_with_bp_on_cycle_free_code(rng):
    # a tree-structured code: three parity checks chained over a path
    H = BinaryMatrix(np.array([[1, 1, 1, 0, 0, 0],
                               [0, 0, 1, 1, 1, 0],
                               [0, 0, 0, 0, 1, 1]]))
    fr = FadingRealization(np.array([1.0, 1.0]))
    agree = 0
    for _ in range(50):
        w = transmit(np.zeros(6, int), fr, 0.1, rng)
        from rootldpc.channel import channel_llr
        ml = decode_ml_exhaustive(H, w).hard_bits
        bp = decode(H, channel_llr(w)).hard_bits
        agree += np.array_equal(ml, bp)
    assert agree >= 49


def test_ml_ties_never_favour_transmitted_word():
    H = build_wstar2(12)
    w = transmit(np.zeros(12, int), FadingRealization(np.array([0.0, 0.0])), 0.0, np.random.default_rng(0))
    assert decode_ml_exhaustive(H, w).word_error


def test_wstar2_ml_slope_two():
    H = build_wstar2(12)
    ch = ChannelConfig(rate=5 / 12)
    dec = DecoderConfig(variant="ml-exhaustive")
    dbs = [20.0, 30.0]
    curve = simulate_wer(H, ch, dec, dbs, StopRule(60, 2_000_000), seed=3, all_bits=True, with_outage=False)
    slope = loglog_slope(dbs, curve.wer)
    assert -2.6 < slope < -1.4


def test_erasure_simulation_matches_eps_squared(root400):
    p = simulate_point(root400, ChannelConfig(mode="erasure", epsilon=0.3), DecoderConfig(),
                       StopRule(10 ** 9, 20_000), seed=5)
    assert p.ci_low <= 0.09 <= p.ci_high


def test_simulation_reproducible_and_csv(root16):
    ch = ChannelConfig(ebn0_db=8.0)
    a = simulate_wer(root16, ch, DecoderConfig(), [5.0, 8.0], StopRule(20, 5000), seed=2)
    b = simulate_wer(root16, ch, DecoderConfig(), [5.0, 8.0], StopRule(20, 5000), seed=2)
    assert a.to_csv() == b.to_csv()
    head = a.to_csv(header="run").splitlines()
    assert head[0] == "# run"
    assert head[1] == "ebn0_db,trials,word_errors,wer,ci_low,ci_high,avg_iterations,outage"


def test_worker_pool_gives_same_counts(root16):
    ch = ChannelConfig()
    args = (root16, ch, DecoderConfig(), [6.0, 9.0], StopRule(10, 3000))
    assert simulate_wer(*args, seed=4).to_csv() == simulate_wer(*args, seed=4, workers=2).to_csv()


def test_all_zero_matches_random_codewords(root400):
    """Symmetric decoders: WER with random codewords equals the all-zero WER statistically."""
    ch = ChannelConfig(ebn0_db=8.0)
    p0 = simulate_point(root400, ch, DecoderConfig(), StopRule(10 ** 9, 3000), seed=8)
    rng = np.random.default_rng(17)
    from rootldpc.channel import llr_from_gains, sample_fading
    from rootldpc.gf2 import kernel_basis
    trials = 3000
    basis = kernel_basis(root400.H).astype(np.int64)
    c = (rng.integers(0, 2, size=(trials, basis.shape[0])) @ basis % 2).astype(np.uint8)
    gains = np.repeat(sample_fading(ch, rng, trials), 200, axis=1)
    y = gains * (1.0 - 2.0 * c) + rng.normal(0, math.sqrt(ch.sigma2), size=c.shape)
    res = decode_batch(root400, llr_from_gains(y, gains, ch.sigma2), DecoderConfig())
    info = root400.info_positions
    errs = int(np.sum((res.hard_bits[:, info] != c[:, info]).any(axis=1)))
    p1 = errs / trials
    se = math.sqrt(p0.wer * (1 - p0.wer) / trials + p1 * (1 - p1) / trials)
    assert abs(p0.wer - p1) < 4 * se + 1e-3
