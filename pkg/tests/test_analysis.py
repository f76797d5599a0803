import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from rootldpc.analysis import (Chi2Params, DiversityCollapseError, chi2_cdf, chi2_coding_loss_db,
                               chi2_pdf, chi2_small_t_coefficient, g_function, g_function_mc,
                               parity_bound)
from rootldpc.stats import loglog_slope

BAL = Chi2Params(0.5, 0.5)
SPLITS = [Chi2Params(0.5, 0.5), Chi2Params(0.4, 0.6), Chi2Params(0.25, 0.75), Chi2Params(0.1, 0.9)]


def test_params_validation():
    with pytest.raises(ValueError):
        Chi2Params(0.3, 0.3)
    with pytest.raises(ValueError):
        Chi2Params(-0.1, 1.1)
    assert Chi2Params.from_a(0.3).b == pytest.approx(0.7)


@pytest.mark.parametrize("p", SPLITS + [Chi2Params(0.0, 1.0)])
def test_pdf_integrates_to_one(p):
    val, _ = integrate.quad(lambda y: chi2_pdf(y, p), 0, np.inf, epsabs=1e-12, epsrel=1e-12)
    assert val == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("p", SPLITS[1:])
def test_cdf_is_integral_of_pdf(p):
    for t in (0.05, 0.7, 3.0):
        val, _ = integrate.quad(lambda y: chi2_pdf(y, p), 0, t, epsabs=1e-13)
        assert chi2_cdf(t, p) == pytest.approx(val, abs=1e-10)


def test_unbalanced_tends_to_balanced():
    y = np.linspace(0, 4, 41)
    near = Chi2Params(0.5 - 1e-6, 0.5 + 1e-6)
    assert np.max(np.abs(chi2_pdf(y, near) - chi2_pdf(y, BAL))) < 1e-5
    assert np.max(np.abs(chi2_cdf(y, near) - chi2_cdf(y, BAL))) < 1e-5


def test_cdf_examples():
    assert chi2_cdf(0.0, BAL) == 0.0
    assert chi2_cdf(0.1, BAL) == pytest.approx(1 - math.exp(-0.2) * 1.2, rel=1e-12)
    assert chi2_cdf(50.0, Chi2Params(0.2, 0.8)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        chi2_cdf(-1.0, BAL)


@pytest.mark.parametrize("p", SPLITS)
def test_small_t_coefficient(p):
    t = 1e-3
    assert chi2_cdf(t, p) / t ** 2 == pytest.approx(chi2_small_t_coefficient(p), rel=0.01)


def test_small_t_slopes():
    t = np.geomspace(1e-4, 1e-2, 7)
    snr_db = -10 * np.log10(t)
    assert loglog_slope(snr_db, chi2_cdf(t, Chi2Params(0.3, 0.7))) == pytest.approx(-2, abs=0.02)
    assert loglog_slope(snr_db, chi2_cdf(t, Chi2Params(0.0, 1.0))) == pytest.approx(-1, abs=0.02)
    with pytest.raises(DiversityCollapseError):
        chi2_small_t_coefficient(Chi2Params(1.0, 0.0))


@pytest.mark.parametrize("p", SPLITS)
@pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
def test_cdf_matches_sampling(p, t):
    r = np.random.default_rng(11)
    n = 400_000
    y = p.a * r.exponential(size=n) + p.b * r.exponential(size=n)
    est = np.mean(y <= t)
    assert abs(est - chi2_cdf(t, p)) < 4 * math.sqrt(est * (1 - est) / n)


def test_coding_loss():
    assert chi2_coding_loss_db(BAL) == 0.0
    assert chi2_coding_loss_db(Chi2Params(0.25, 0.75)) == pytest.approx(0.6247, abs=1e-4)
    assert chi2_coding_loss_db(Chi2Params(0.1, 0.9)) == pytest.approx(2.218, abs=1e-3)
    with pytest.raises(DiversityCollapseError):
        chi2_coding_loss_db(Chi2Params(0.0, 1.0))


@given(st.floats(0.2, 3.0), st.floats(0.01, 2.0))
def test_g_symmetric_point(alpha, sigma2):
    assert g_function(alpha, alpha, sigma2) == pytest.approx(0.5, abs=1e-6)


@given(st.floats(0.2, 3.0), st.floats(0.2, 3.0), st.floats(0.05, 2.0))
def test_g_complementary(a1, a2, sigma2):
    assert g_function(a1, a2, sigma2) + g_function(a2, a1, sigma2) == pytest.approx(1.0, abs=1e-7)


def test_g_monotone_in_alpha1():
    vals = [g_function(a, 1.0, 0.3) for a in (0.3, 0.6, 1.0, 1.5, 2.5)]
    assert all(x < y for x, y in zip(vals, vals[1:]))


def test_g_small_noise_limit():
    assert g_function(1.0, 2.0, 0.1) < 1e-4
    assert g_function(2.0, 1.0, 0.1) > 1 - 1e-4


@pytest.mark.parametrize("a1,a2,s2", [(1.0, 1.2, 0.5), (0.7, 0.4, 1.0), (1.5, 1.0, 0.2),
                                      (0.3, 0.9, 2.0), (1.0, 0.5, 0.8)])
def test_g_matches_sampling(a1, a2, s2):
    p, se = g_function_mc(a1, a2, s2, 2_000_000, 3)
    assert abs(p - g_function(a1, a2, s2)) < 3 * se + 1e-9


def test_parity_bound_equal_gains():
    pb = parity_bound(1.0, 1.0, 0.5)
    assert pb.g4 == pytest.approx(1 / 16, abs=1e-6)
    assert pb.meets_ergodic_bounds
    assert pb.complement == pytest.approx(15 / 16, abs=1e-6)


def test_g_rejects_bad_input():
    with pytest.raises(ValueError):
        g_function(0.0, 1.0, 1.0)
