import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from cirlab.model import CirParams, NoncentralChiSqSpec, marginal_law
from cirlab.stats import (dkw_threshold, frequency_se, ks_statistic, ks_test, ks_two_sample,
                          ks_two_sample_statistic, mean_test, noncentral_chisq_cdf, two_mean_test)


class TestNoncentralCdf:
    @pytest.mark.parametrize("df,lam,scale", [(4.0, 2.0, 1.0), (0.7, 15.0, 0.3), (10.0, 0.5, 2.0),
                                              (2.5, 400.0, 0.01), (1.0, 1e-3, 1.0)])
    def test_matches_scipy(self, df, lam, scale):
        spec = NoncentralChiSqSpec(df, lam, scale)
        ref = sps.ncx2(df, lam, scale=scale)
        x = ref.ppf(np.linspace(0.001, 0.999, 41))
        np.testing.assert_allclose(noncentral_chisq_cdf(spec, x), ref.cdf(x), rtol=1e-9, atol=1e-12)

    def test_exponential_case(self):
        spec = NoncentralChiSqSpec(2.0, 0.0)
        x = np.linspace(0.01, 30, 200)
        np.testing.assert_allclose(noncentral_chisq_cdf(spec, x), -np.expm1(-x / 2), rtol=0, atol=1e-12)

    def test_far_tail(self):
        spec = marginal_law(CirParams(1.0, 1.0, 2.0), 0.5)
        x = spec.mean + 20 * math.sqrt(spec.variance)
        assert noncentral_chisq_cdf(spec, x) >= 1 - 1e-8

    def test_nonpositive(self):
        spec = NoncentralChiSqSpec(3.0, 1.0)
        np.testing.assert_array_equal(noncentral_chisq_cdf(spec, np.array([-1.0, 0.0])), [0.0, 0.0])

    @pytest.mark.parametrize("df", [1.0, 2.0, 4.0, 9.0])
    @pytest.mark.parametrize("lam", [0.0, 1.0, 10.0])
    def test_median_bracket(self, df, lam):
        spec = NoncentralChiSqSpec(df, lam)
        assert 0.4 < noncentral_chisq_cdf(spec, spec.mean) < 0.7

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.2, 20), st.floats(0, 50), st.lists(st.floats(0, 100), min_size=2, max_size=20))
    def test_monotone_in_unit_interval(self, df, lam, xs):
        xs = np.sort(np.array(xs))
        F = noncentral_chisq_cdf(NoncentralChiSqSpec(df, lam), xs)
        assert np.all((F >= 0) & (F <= 1))
        assert np.all(np.diff(F) >= -1e-15)


class TestKs:
    def test_single_point_at_median(self):
        assert ks_statistic(np.array([0.0]), sps.norm.cdf) == 0.5

    def test_known_value(self):
        # uniform sample {0.1, 0.5}: sup over steps = max(0.5 - 0.1, 0.5 - 0.0, 1 - 0.5) = 0.5
        assert ks_statistic(np.array([0.1, 0.5]), lambda x: np.clip(x, 0, 1)) == pytest.approx(0.5)

    def test_matches_scipy(self):
        x = np.random.default_rng(0).normal(size=500)
        assert ks_statistic(x, sps.norm.cdf) == pytest.approx(sps.kstest(x, "norm").statistic, rel=1e-12)

    def test_atom_with_left_limit(self):
        x = np.full(10, 2.0)
        stat = ks_statistic(x, lambda v: (v >= 2.0).astype(float), cdf_left=lambda v: (v > 2.0).astype(float))
        assert stat == 0.0

    def test_self_consistency_rate(self):
        rng = np.random.default_rng(1)
        ok = sum(ks_test(rng.normal(size=100_000), sps.norm.cdf).decision == "consistent" for _ in range(100))
        assert ok >= 99

    def test_power(self):
        x = np.random.default_rng(2).normal(3.0, 1.0, size=1000)
        assert ks_test(x, sps.norm.cdf).decision == "rejected"

    def test_dkw(self):
        assert dkw_threshold(100_000, 0.999) == pytest.approx(math.sqrt(math.log(2000) / 200_000))

    def test_two_sample_matches_scipy(self):
        rng = np.random.default_rng(3)
        a, b = rng.normal(size=700), rng.normal(0.1, size=300)
        assert ks_two_sample_statistic(a, b) == pytest.approx(sps.ks_2samp(a, b).statistic, rel=1e-12)

    def test_two_sample_decisions(self):
        rng = np.random.default_rng(4)
        assert ks_two_sample(rng.normal(size=5000), rng.normal(size=5000)).decision == "consistent"
        assert ks_two_sample(rng.normal(size=5000), rng.normal(0.5, size=5000)).decision == "rejected"


class TestMeanTests:
    def test_mean_test(self):
        x = np.random.default_rng(5).normal(1.0, 2.0, size=10_000)
        rep = mean_test(x, 1.0)
        assert rep.decision == "consistent"
        assert rep.standard_error == pytest.approx(2.0 / 100, rel=0.05)
        assert mean_test(x, 1.5).decision == "rejected"

    def test_allowance(self):
        x = np.random.default_rng(6).normal(1.0, 0.1, size=10_000)
        assert mean_test(x, 1.2).decision == "rejected"
        assert mean_test(x, 1.2, allowance=0.25).decision == "consistent"

    def test_two_mean(self):
        rng = np.random.default_rng(7)
        assert two_mean_test(rng.normal(size=4000), rng.normal(size=1000)).decision == "consistent"

    def test_frequency_se(self):
        assert frequency_se(0.5, 100) == pytest.approx(0.05)
