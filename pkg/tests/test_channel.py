import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from rootldpc.channel import (LLR_MAX, ChannelConfig, FadingRealization, bpsk_awgn_mi,
                              capacity_limit_ebn0_db, channel_llr, instantaneous_mi, inverse_mi,
                              outage_probability, outage_quadrature, sample_fading, transmit)


def mi_by_quad(s):
    """Independent oracle: adaptive quadrature of E[log2(1 + exp(-L))], L ~ N(4s, 8s)."""
    m, sd = 4 * s, math.sqrt(8 * s)
    f = lambda x: stats.norm.pdf(x, m, sd) * np.logaddexp(0, -x) / math.log(2)
    val, _ = integrate.quad(f, m - 40 * sd, m + 40 * sd, epsabs=1e-14, epsrel=1e-13, limit=500)
    return 1 - val


def test_config_derived_quantities():
    cfg = ChannelConfig(rate=0.5, ebn0_db=10.0)
    assert cfg.gamma == pytest.approx(5.0)
    assert cfg.sigma2 == pytest.approx(0.1)
    with pytest.raises(ValueError):
        ChannelConfig(mode="fixed", alpha=(1.0,))


def test_fixed_fading():
    cfg = ChannelConfig(mode="fixed", alpha=(1.0, 1.0))
    assert sample_fading(cfg, np.random.default_rng(0)).tolist() == [1.0, 1.0]


def test_erasure_fading_rate(rng):
    a = sample_fading(ChannelConfig(mode="erasure", epsilon=0.3), rng, 50_000)
    n = a.size
    p = np.mean(a == 0)
    assert abs(p - 0.3) < 3 * math.sqrt(0.3 * 0.7 / n)
    assert set(np.unique(a)) <= {0.0, math.inf}


def test_rayleigh_power_unit_mean(rng):
    a = sample_fading(ChannelConfig(), rng, 500_000)
    assert abs(np.mean(a ** 2) - 1) < 0.01


def test_transmit_noiseless():
    w = transmit(np.zeros(8, dtype=int), FadingRealization(np.array([1.0, 1.0])), 0.0, np.random.default_rng(0))
    assert np.allclose(w.y, 1.0)
    w = transmit(np.zeros(8, dtype=int), FadingRealization(np.array([2.0, 1.0])), 0.0, np.random.default_rng(0))
    assert np.allclose(w.y[:4], 2.0) and np.allclose(w.y[4:], 1.0)


def test_transmit_erased_block_is_pure_noise():
    rng_a, rng_b = np.random.default_rng(4), np.random.default_rng(4)
    w = transmit(np.zeros(8, dtype=int), FadingRealization(np.array([0.0, 1.0])), 0.3, rng_a)
    z = rng_b.normal(0, math.sqrt(0.3), 8)
    assert np.allclose(w.y[:4], z[:4])


def test_llr_examples():
    fr = FadingRealization(np.array([1.0, 0.0]))
    from rootldpc.channel import ReceivedWord
    llr = channel_llr(ReceivedWord(np.array([0.25, 0.25, 5.0, 5.0]), fr, 0.5))
    assert llr[:2] == pytest.approx([1.0, 1.0])
    assert (llr[2:] == 0).all()
    llr = channel_llr(ReceivedWord(np.array([1.0, 1.0]), FadingRealization(np.array([1.0, 1.0])), 0.5))
    assert llr == pytest.approx([4.0, 4.0])
    inf = channel_llr(ReceivedWord(np.array([np.inf, -np.inf]), FadingRealization(np.array([np.inf, np.inf])), 0.5))
    assert inf.tolist() == [LLR_MAX, -LLR_MAX]


@given(st.lists(st.sampled_from([0, 1]), min_size=4, max_size=4))
def test_llr_sign_matches_symbol_noiseless(bits):
    w = transmit(np.array(bits), FadingRealization(np.array([1.0, 0.7])), 0.0, np.random.default_rng(0))
    w = type(w)(w.y, w.fading, 0.2)
    assert (np.sign(channel_llr(w)) == 1 - 2 * np.array(bits)).all()


@pytest.mark.parametrize("s", [0.05, 0.3, 1.0, 2.0, 5.0, 20.0])
def test_mi_matches_adaptive_quadrature(s):
    assert abs(bpsk_awgn_mi(s) - mi_by_quad(s)) < 1e-9


def test_mi_limits_and_capacity():
    assert bpsk_awgn_mi(0.0) == 0.0
    assert abs(bpsk_awgn_mi(100.0) - 1) < 1e-6
    assert capacity_limit_ebn0_db(0.5) == pytest.approx(0.187, abs=5e-4)
    assert bpsk_awgn_mi(inverse_mi(0.3)) == pytest.approx(0.3, abs=1e-12)


@given(st.floats(0, 50), st.floats(0, 50))
def test_mi_monotone(a, b):
    lo, hi = sorted((a, b))
    assert bpsk_awgn_mi(lo) <= bpsk_awgn_mi(hi) + 1e-15


def test_instantaneous_mi_examples():
    assert instantaneous_mi(3.0, [1.0, 1.0]) == pytest.approx(bpsk_awgn_mi(3.0))
    assert instantaneous_mi(3.0, [0.0, 0.0]) == 0.0
    assert instantaneous_mi(3.0, [0.0, np.inf]) == pytest.approx(0.5)


@given(st.lists(st.floats(0, 3), min_size=2, max_size=4), st.randoms(use_true_random=False))
def test_instantaneous_mi_permutation_invariant(alpha, rnd):
    perm = alpha[:]
    rnd.shuffle(perm)
    assert instantaneous_mi(2.0, alpha) == pytest.approx(instantaneous_mi(2.0, perm), abs=1e-14)


def test_outage_erasure_is_eps_squared():
    est = outage_probability(5.0, 0.5, 2, 200_000, 3, mode="erasure", epsilon=0.3)
    assert est.ci_low <= 0.09 <= est.ci_high


def test_outage_low_snr_is_certain():
    assert outage_probability(1e-6, 0.5, 2, 20_000, 1).p == 1.0


def test_outage_deterministic_for_seed():
    a = outage_probability(5.0, 0.5, 2, 50_000, 9)
    b = outage_probability(5.0, 0.5, 2, 50_000, 9)
    assert a == b


def test_outage_nonincreasing_in_snr():
    vals = [outage_quadrature(0.5 * 10 ** (db / 10)) for db in (0, 5, 10, 15, 20)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_outage_mc_matches_quadrature_at_10db():
    gamma = 0.5 * 10.0
    est = outage_probability(gamma, 0.5, 2, 400_000, 11)
    assert est.ci_low <= outage_quadrature(gamma) <= est.ci_high
