import math

import numpy as np
import pytest
from scipy import integrate

from cirlab.errors import DomainTooSmall, InvalidTruncation, OrderingViolation
from cirlab.model import CirParams
from cirlab.truncated import (hitting_probability, scale_density, scale_function, truncated_diffusion,
                              truncated_drift, truncation_level)

P = CirParams(1.0, 1.0, 1.0)
C = 5.0


def direct_scale(x, params, C):
    """Oracle: plain quadrature of V' on [1, x], split at the kink."""
    f = lambda y: scale_density(y, params, C)
    pts = [1.0, x] if x <= C else [1.0, C, x]
    return sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-13, limit=400)[0] for a, b in zip(pts, pts[1:]))


class TestCoefficients:
    def test_drift(self):
        assert truncated_drift(0.0, P, C) == 1.0
        assert truncated_drift(2 * C, P, C) == 1.0 - C
        assert truncated_drift(P.b, P, C) == 0.0

    def test_diffusion(self):
        assert truncated_diffusion(-1.0, P, C) == 0.0
        assert truncated_diffusion(C, P, C) == math.sqrt(C)
        assert truncated_diffusion(0.25, CirParams(1, 2, 1), C) == 1.0

    def test_vectorised(self):
        np.testing.assert_array_equal(truncated_drift(np.array([0.0, 10.0]), P, C), [1.0, -4.0])

    @pytest.mark.parametrize("bad", [1.0, 0.5, -2.0])
    def test_level_validated(self, bad):
        with pytest.raises(InvalidTruncation):
            truncation_level(bad, P)

    def test_level_must_exceed_b(self):
        with pytest.raises(InvalidTruncation):
            truncation_level(3.0, CirParams(3.0, 1.0, 1.0))


class TestScaleDensity:
    def test_at_one(self):
        assert scale_density(1.0, P, C) == 1.0

    def test_boundary_case_value(self):
        p = CirParams(1.0, math.sqrt(2), 1.0)
        assert scale_density(math.e, p, C) == pytest.approx(math.exp(-1) * math.exp(math.e - 1), rel=1e-14)

    @pytest.mark.parametrize("eps", [1e-4, 1e-6, 1e-8])
    def test_continuous_at_seam(self, eps):
        lo, hi = scale_density(C - eps, P, C), scale_density(C + eps, P, C)
        assert abs(lo - hi) <= 50 * eps * hi

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            scale_density(0.0, P, C)


class TestScaleFunction:
    def test_zero_at_one(self):
        assert scale_function(1.0, P, C).value == 0.0

    def test_method_switch(self):
        assert scale_function(C, P, C).method == "quadrature"
        assert scale_function(C * (1 + 1e-12), P, C).method == "closed_form_tail"

    @pytest.mark.parametrize("params", [P, CirParams(2.0, 1.5, 1.0), CirParams(0.5, 1.0, 1.0)])
    @pytest.mark.parametrize("factor", [1.01, 1.5, 2.5, 4.0])
    def test_tail_matches_quadrature(self, params, factor):
        x = C * factor
        assert scale_function(x, params, C).value == pytest.approx(direct_scale(x, params, C), rel=1e-8)

    @pytest.mark.parametrize("x", [0.3, 0.9, 2.0, 4.9])
    def test_inner_matches_quadrature(self, x):
        assert scale_function(x, P, C).value == pytest.approx(direct_scale(x, P, C), rel=1e-10)

    def test_strictly_increasing(self):
        xs = np.concatenate([np.geomspace(1e-3, 1, 30), np.linspace(1.01, 10 * C, 60)])
        vals = [scale_function(x, P, C).value for x in xs]
        assert np.all(np.diff(vals) > 0)

    @pytest.mark.parametrize("params", [P, CirParams(1.0, math.sqrt(2), 1.0)])
    def test_diverges_at_zero(self, params):
        vals = [scale_function(10.0 ** -k, params, C).value for k in range(2, 9)]
        assert all(v < 0 for v in vals)
        assert np.all(np.diff(vals) < 0)

    def test_boundary_case_is_logarithmic(self):
        # 2b = sigma^2: V(x) ~ ln x near zero, so each decade adds about e^{-1}
        p = CirParams(1.0, math.sqrt(2), 1.0)
        v = [scale_function(10.0 ** -k, p, C).value for k in (7, 8)]
        assert v[0] - v[1] == pytest.approx(math.exp(-1) * math.log(10), rel=1e-6)

    def test_refuses_tiny_x(self):
        with pytest.raises(DomainTooSmall):
            scale_function(1e-13, P, C)


class TestHittingProbability:
    def test_reference_value(self):
        h = hitting_probability(P, C, 0.5, 2.0)
        assert 0.69 < h.p_alpha_first < 0.70

    @pytest.mark.parametrize("alpha,beta", [(0.5, 2.0), (0.01, 1.5), (0.9, 30.0), (0.2, 6.0)])
    def test_sum_to_one(self, alpha, beta):
        h = hitting_probability(P, C, alpha, beta)
        assert 0 <= h.p_alpha_first <= 1 and 0 <= h.p_beta_first <= 1
        assert abs(h.p_alpha_first + h.p_beta_first - 1) <= 1e-12

    def test_alpha_near_x0(self):
        assert hitting_probability(P, C, 1 - 1e-9, 2.0).p_alpha_first == pytest.approx(1, abs=1e-6)

    def test_beta_near_x0(self):
        assert hitting_probability(P, C, 0.5, 1 + 1e-9).p_beta_first == pytest.approx(1, abs=1e-6)

    def test_monotone_in_x0(self):
        ps = [hitting_probability(CirParams(1, 1, x0), C, 0.5, 8.0).p_alpha_first
              for x0 in np.linspace(0.55, 7.9, 40)]
        assert np.all(np.diff(ps) <= 0)

    @pytest.mark.parametrize("alpha,beta", [(1.0, 2.0), (0.5, 1.0), (2.0, 0.5), (0.0, 2.0)])
    def test_ordering(self, alpha, beta):
        with pytest.raises(OrderingViolation):
            hitting_probability(P, C, alpha, beta)
