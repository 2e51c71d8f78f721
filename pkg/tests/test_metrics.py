import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zetaclt import metrics as mt
from zetaclt.errors import MassNotZero, MomentsNotZero
from zetaclt.gfun import ClipSlope, MinIdPower, Power
from zetaclt.measure import convolve, dirac, discrete, normal, power, scale, standardize, variation_nu0, zero

RAD = discrete([-1.0, 1.0], [0.5, 0.5])
D = RAD - normal()
NU3_N = 4 / math.sqrt(2 * math.pi)

# oracle values from independent mpmath quadrature of |F_M| (30 digits, split at jumps and sign changes)
ZETA1_RAD = 0.535377321547879837652358834402
ZETA1_RAD_N2 = 0.376026360025851137754646808942
ZETA1_TWO_POINT = 0.758239873367265753031203020365
KOLM_TWO_POINT = 0.530558659818236393242324843592


class TestKolmogorov:
    def test_rademacher(self):
        assert mt.kolmogorov(D) == pytest.approx(0.341344746068542948, abs=1e-13)

    def test_trivial(self):
        assert mt.kolmogorov(zero()) == 0.0
        assert mt.kolmogorov(dirac(0.0) - normal()) == pytest.approx(0.5, abs=1e-15)

    def test_rademacher_pair_sum(self):
        m = scale(power(RAD, 2), 1 / math.sqrt(2)) - normal()
        assert mt.kolmogorov(m) == pytest.approx(0.25, abs=1e-14)

    def test_two_point(self):
        p = standardize(discrete([0.0, 1.0], [0.9, 0.1]))
        assert mt.kolmogorov(p - normal()) == pytest.approx(KOLM_TWO_POINT, abs=1e-12)

    def test_requires_mass_zero(self):
        with pytest.raises(MassNotZero):
            mt.kolmogorov(RAD)

    def test_gaussian_only(self):
        # sup |Phi(x) - Phi(x/2)| attained at x^2 = 8 ln 2 / 3
        x = math.sqrt(8 * math.log(2) / 3)
        from scipy.stats import norm
        assert mt.kolmogorov(normal() - normal(2.0)) == pytest.approx(norm.cdf(x) - norm.cdf(x / 2), abs=1e-12)


class TestZeta1:
    def test_oracles(self):
        assert mt.zeta1_exact(D) == pytest.approx(ZETA1_RAD, abs=1e-12)
        m = scale(power(RAD, 2), 1 / math.sqrt(2)) - normal()
        assert mt.zeta1_exact(m) == pytest.approx(ZETA1_RAD_N2, abs=1e-12)
        p = standardize(discrete([0.0, 1.0], [0.9, 0.1]))
        assert mt.zeta1_exact(p - normal()) == pytest.approx(ZETA1_TWO_POINT, abs=1e-12)

    def test_trivial(self):
        assert mt.zeta1_exact(dirac(0.0) - dirac(1.0)) == 1.0
        assert mt.zeta1_exact(zero()) == 0.0

    def test_gaussian_shift(self):
        assert mt.zeta1_exact(normal(mean=0.7) - normal()) == pytest.approx(0.7, abs=1e-12)

    def test_scale_difference(self):
        # W1(N(0,1), N(0,s^2)) = |1 - s| E|Z|
        assert mt.zeta1_exact(normal(2.5) - normal()) == pytest.approx(1.5 * math.sqrt(2 / math.pi), abs=1e-11)

    @given(st.lists(st.floats(-4, 4), min_size=1, max_size=4), st.lists(st.floats(-4, 4), min_size=1, max_size=4))
    def test_matches_sorted_sample_formula(self, xs, ys):
        # equal-weight empirical laws of equal size: W1 = mean |x_(i) - y_(i)|
        k = min(len(xs), len(ys))
        xs, ys = sorted(xs[:k]), sorted(ys[:k])
        m = discrete(xs, np.full(k, 1 / k)) - discrete(ys, np.full(k, 1 / k))
        assert mt.zeta1_exact(m) == pytest.approx(np.mean(np.abs(np.subtract(xs, ys))), abs=1e-12)


class TestTestFunctions:
    @pytest.mark.parametrize("delta", [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_h_dominance(self, delta):
        x = np.linspace(-30, 30, 60001)
        assert np.all(mt.h_delta(x, delta) >= np.abs(x) ** (2 + delta) * (1 - 1e-14))

    def test_h_endpoints(self):
        x = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(mt.h_delta(x, 1.0), np.abs(x) ** 3, atol=1e-14)
        np.testing.assert_allclose(mt.h_delta(x, 0.0), x ** 2, atol=1e-14)

    @given(st.floats(0, 1), st.floats(-5, 5), st.floats(-5, 5))
    def test_h_second_derivative_modulus(self, delta, x, y):
        d = abs(x - y)
        lhs = abs(float(mt.h_delta_dd(x, delta)) - float(mt.h_delta_dd(y, delta)))
        assert lhs <= (1 + delta) * (2 + delta) * min(d, d ** delta) + 1e-12

    @given(st.floats(0.1, 5), st.floats(0, 1), st.floats(-20, 20))
    def test_fbk_second_derivative(self, b, k, x):
        _, dd = mt.f_clipslope_derivs(np.array([x]), b, k)
        assert dd[0] == pytest.approx(float(ClipSlope(b, k)(abs(x))), abs=1e-12)

    def test_fbk_vanishes_to_second_order(self):
        d1, d2 = mt.f_clipslope_derivs(np.array([0.0]), 2.0, 0.3)
        assert (float(mt.f_clipslope(0.0, 2.0, 0.3)), d1[0], d2[0]) == (0.0, 0.0, 0.0)


class TestZetaSandwich:
    def test_upper_rademacher(self):
        assert mt.zeta2delta_upper(D, 1.0) == pytest.approx((1 + NU3_N) / 6, abs=1e-12)

    def test_lower_rademacher(self):
        assert mt.zeta_lower_testfn(D, 1.0) == pytest.approx((NU3_N - 1) / 6, abs=1e-12)

    def test_zero(self):
        iv = mt.zeta2delta_interval(zero(), 0.5)
        assert (iv.lower, iv.upper) == (0.0, 0.0)

    def test_heuristic_flag(self):
        assert "heuristic_lower" in mt.zeta2delta_interval(D, 0.0).flags
        assert "heuristic_lower" not in mt.zeta2delta_interval(D, 0.5).flags

    def test_requires_matched_moments(self):
        with pytest.raises(MomentsNotZero):
            mt.zeta_lower_testfn(dirac(0.0) - dirac(1.0), 0.5)

    @pytest.mark.parametrize("seed", range(5))
    def test_upper_monotone_in_delta(self, seed):
        from zetaclt.properties import random_m22
        m = random_m22(np.random.default_rng(seed))
        ups = [mt.zeta2delta_upper(m, d) for d in (0.0, 0.25, 0.5, 0.75, 1.0)]
        assert all(a <= b + 1e-12 for a, b in zip(ups, ups[1:]))
        lo = mt.zeta_lower_testfn(m, 0.5)
        assert lo <= ups[2]


class TestInequalityChecks:
    def test_regularity_example(self):
        r = mt.verify_regularity(dirac(0.0) - dirac(1.0), discrete([0.0, 5.0], [0.5, 0.5]), 1, Power(1.0))
        assert r.lhs == pytest.approx(1.0) and r.valid

    def test_regularity_shift_equality(self):
        m1 = RAD - normal()
        r = mt.verify_regularity(m1, dirac(0.8), 1, Power(1.0))
        assert r.lhs == pytest.approx(r.rhs_upper, abs=1e-10)

    def test_homogeneity(self):
        assert mt.verify_homogeneity(dirac(0.0) - dirac(1.0), 2.0).extra["scaled"] == pytest.approx(2.0, abs=1e-15)
        m = discrete([0.2, 1.4], [0.3, 0.7]) - normal(0.8, 0.5)
        assert mt.verify_homogeneity(m, 0.37).valid

    def test_smoothing(self):
        r = mt.verify_smoothing(dirac(0.0) - dirac(1.0), 0.5)
        assert r.lhs == 1.0 and r.valid
        r = mt.verify_smoothing(dirac(0.0) - dirac(1.0), 1e-4)
        assert r.rhs_upper - r.lhs < 1e-3

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
    def test_mn_sigma(self, sigma):
        for r in mt.verify_mn_sigma(D, sigma, 1.0):
            assert r.valid

    def test_mn_sigma_zero(self):
        for r in mt.verify_mn_sigma(zero(), 1.0, 0.5):
            assert r.lhs == 0.0 and r.valid
