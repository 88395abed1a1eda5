import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cirlab.errors import DegenerateTime, NonPositiveParameter
from cirlab.model import (CirParams, marginal_law, mean_at, second_moment_at, second_moment_sup,
                          validate_params, variance_at)

positive = st.floats(min_value=0.05, max_value=5.0)
times = st.floats(min_value=0.0, max_value=20.0)


def three_term_second_moment(b, sigma, x0, t):
    """Literal three-term expression, evaluated at 50 digits."""
    mp = pytest.importorskip("mpmath")
    mp.mp.dps = 50
    b, s, x0, t = (mp.mpf(v) for v in (b, sigma, x0, t))
    e = mp.e ** (-t)
    return float(x0 * (2 * b + s ** 2) * e + (x0 ** 2 - x0 * s ** 2 - 2 * x0 * b) * e ** 2
                 + (b * s ** 2 / 2 + b ** 2) * (1 - e) ** 2)


class TestValidateParams:
    def test_feller_holds(self):
        assert validate_params({"b": 1, "sigma": 1.2, "x0": 1}).feller_ok

    def test_feller_boundary(self):
        p = validate_params(b=1, sigma=math.sqrt(2), x0=1)
        assert 2 * p.b == pytest.approx(p.sigma ** 2)
        assert p.feller_ok

    def test_feller_violated(self):
        assert not validate_params(b=1, sigma=2, x0=1).feller_ok

    @pytest.mark.parametrize("field", ["b", "sigma", "x0"])
    def test_rejects_nonpositive(self, field):
        raw = {"b": 1, "sigma": 1, "x0": 1, field: 0}
        with pytest.raises(NonPositiveParameter) as info:
            validate_params(raw)
        assert info.value.field == field

    def test_zero_sigma_opt_in(self):
        assert validate_params(b=1, sigma=0, x0=1, allow_zero_sigma=True).sigma == 0


class TestMoments:
    def test_mean_at_zero(self):
        assert mean_at(CirParams(2, 1, 0.7), 0.0) == 0.7

    def test_mean_at_ln2(self):
        assert mean_at(CirParams(2, 1, 1), math.log(2)) == pytest.approx(1.5, abs=1e-15)

    def test_mean_long_run(self):
        assert abs(mean_at(CirParams(2, 1, 1), 50.0) - 2.0) < 1e-12

    def test_second_moment_at_zero_exact(self):
        p = CirParams(1.3, 0.8, 2.7)
        assert second_moment_at(p, 0.0) == 2.7 ** 2
        assert variance_at(p, 0.0) == 0.0

    def test_second_moment_high_precision(self):
        expected = three_term_second_moment(1, 1, 1, 1)
        assert second_moment_at(CirParams(1, 1, 1), 1.0) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("b,sigma,x0", [(1, 1, 1), (0.3, 0.5, 2.0), (4.0, 2.5, 0.1)])
    @pytest.mark.parametrize("t", [1e-8, 1e-3, 0.5, 3.0])
    def test_second_moment_matches_three_term_formula(self, b, sigma, x0, t):
        expected = three_term_second_moment(b, sigma, x0, t)
        assert second_moment_at(CirParams(b, sigma, x0), t) == pytest.approx(expected, rel=1e-13)

    def test_vectorised(self):
        p = CirParams(1, 1, 1)
        ts = np.array([0.0, 0.5, 1.0])
        np.testing.assert_allclose(mean_at(p, ts), [mean_at(p, t) for t in ts])

    @given(positive, positive, positive, times)
    def test_variance_nonnegative(self, b, sigma, x0, t):
        p = CirParams(b, sigma, x0)
        assert second_moment_at(p, t) >= mean_at(p, t) ** 2 * (1 - 1e-15)


class TestMarginalLaw:
    def test_df(self):
        assert marginal_law(CirParams(1, math.sqrt(2), 1), 0.7).df == pytest.approx(2.0)

    def test_noncentrality_vanishes(self):
        assert marginal_law(CirParams(1, 1, 1), 60.0).noncentrality < 1e-20

    def test_degenerate_time(self):
        with pytest.raises(DegenerateTime):
            marginal_law(CirParams(1, 1, 1), 0.0)

    @pytest.mark.parametrize("b,sigma,x0", [(1, 1, 1), (0.5, 1.0, 3.0), (2.0, 0.3, 0.2), (1, 1.4, 5)])
    @pytest.mark.parametrize("t", [1e-4, 0.1, 1.0, 7.0])
    def test_moment_identities(self, b, sigma, x0, t):
        p = CirParams(b, sigma, x0)
        spec = marginal_law(p, t)
        assert spec.scale * (spec.df + spec.noncentrality) == pytest.approx(mean_at(p, t), rel=1e-10)
        assert spec.scale ** 2 * (2 * spec.df + 4 * spec.noncentrality) == pytest.approx(
            variance_at(p, t), rel=1e-10)
        assert variance_at(p, t) == pytest.approx(second_moment_at(p, t) - mean_at(p, t) ** 2,
                                                  rel=1e-8, abs=1e-14)


class TestSecondMomentSup:
    def test_monotone_case(self):
        p = CirParams(2.0, 1.0, 0.5)
        B = second_moment_sup(p, 1.0).B
        assert B == pytest.approx(second_moment_at(p, 1.0), rel=2e-9)
        assert B >= second_moment_at(p, 1.0)

    def test_deterministic_constant(self):
        p = CirParams(1.5, 1e-8, 1.5)
        assert second_moment_sup(p, 2.0).B == pytest.approx(2.25, rel=1e-8)

    @pytest.mark.parametrize("b,sigma,x0,T", [(1, 1, 1, 1), (1, 1.4, 3, 4), (0.2, 0.6, 0.05, 10)])
    def test_dominates_dense_grid(self, b, sigma, x0, T):
        p = CirParams(b, sigma, x0)
        bounds = second_moment_sup(p, T)
        dense = second_moment_at(p, np.linspace(0, T, 200_001))
        assert bounds.B >= dense.max()
        assert bounds.B >= second_moment_at(p, T / 2)
        assert bounds.B <= dense.max() * (1 + 1e-8)

    def test_interior_maximum(self):
        # x0 slightly above b with large sigma: E X^2 rises, peaks near t = 1.2, then decays
        p = CirParams(1.0, 1.4, 1.2)
        ts = np.linspace(0, 10, 100_001)
        vals = second_moment_at(p, ts)
        assert 0 < np.argmax(vals) < ts.size - 1
        B = second_moment_sup(p, 10).B
        assert vals.max() <= B <= vals.max() * (1 + 1e-8)
