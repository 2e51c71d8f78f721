import math
import warnings

import numpy as np
import pytest

from zetaclt import metrics as mt
from zetaclt.errors import BadParams, GapNotReached, InfeasibleGrid
from zetaclt.gfun import MinIdPower, Power
from zetaclt.measure import discrete, normal, zero
from zetaclt.properties import random_m22
from zetaclt.zeta_lp import (GridSpec, audit, lp_coefficients, lp_lower, lp_refine, lp_sandwich, mcshane,
                             max_pair_violation, reconstruct, truncated_moment, zeta1_lp, zeta2_box_lp)

RAD = discrete([-1.0, 1.0], [0.5, 0.5])
D = RAD - normal()
NU3_N = 4 / math.sqrt(2 * math.pi)


class TestGrid:
    def test_refined_keeps_nodes(self):
        g = GridSpec(-2.0, 2.0, 9)
        assert np.all(np.isin(g.x, g.refined().x))

    def test_point_cap(self):
        with pytest.raises(BadParams):
            GridSpec(-1.0, 1.0, 5000)

    def test_window_covers_12sd(self):
        g = GridSpec.for_measure(D)
        assert g.covers(D) and g.right == pytest.approx(12.0)

    def test_uncovered_grid(self):
        with pytest.raises(InfeasibleGrid):
            lp_lower(D, MinIdPower(1.0), GridSpec(-1.0, 1.0, 33))


class TestCoefficients:
    def test_truncated_moment_matches_direct(self):
        m = discrete([-0.5, 0.3, 2.0], [0.2, -0.7, 0.5]) + normal(0.8, 0.4, 0.3)
        for a in (-1.0, 0.1, 1.5):
            for k in (0, 1, 2, 3):
                direct = m.integrate(lambda x: (x - a) ** k if x > a else 0.0, kinks=(a,))
                assert truncated_moment(m, a, k)[0] == pytest.approx(direct, abs=1e-11)

    def test_objective_equals_integral_of_reconstruction(self):
        grid = GridSpec.for_measure(D, 65)
        s = np.cos(grid.x)
        c = lp_coefficients(D, grid, 2)
        f = reconstruct(grid, s, 2)
        kinks = tuple(grid.x)
        direct = D.integrate(lambda x: float(f(x)), kinks=kinks)
        assert float(np.dot(c, s)) == pytest.approx(direct, abs=1e-9)

    def test_mcshane_repairs(self):
        grid = GridSpec(-3.0, 3.0, 33)
        s = np.random.default_rng(1).normal(size=33)
        g = MinIdPower(0.5)
        t = mcshane(grid, s, g)
        assert max_pair_violation(grid, t, g) <= 1e-12
        assert np.all(t <= s + 1e-15)


class TestLowerBound:
    def test_zero(self):
        assert lp_lower(zero(), MinIdPower(1.0), GridSpec(-1, 1, 17)).objective == 0.0

    def test_rademacher_sandwich(self):
        cert = lp_lower(D, MinIdPower(1.0), GridSpec.for_measure(D, 257))
        assert (NU3_N - 1) / 6 - 1e-6 <= cert.objective <= (1 + NU3_N) / 6
        rep = audit(cert, D)
        assert rep["ok"], rep

    def test_nested_monotone(self):
        certs = lp_refine(D, MinIdPower(0.5), GridSpec.for_measure(D, 65), max_points=513)
        objs = [c.objective for c in certs]
        assert all(b >= a for a, b in zip(objs, objs[1:]))
        assert len(objs) == 4

    def test_flat_below_box(self):
        m = random_m22(np.random.default_rng(3), gaussian=False)
        grid = GridSpec.for_measure(m, 129)
        assert lp_lower(m, Power(0.0), grid).objective <= zeta2_box_lp(m, grid).objective + 1e-9

    def test_certificate_csv(self):
        cert = lp_lower(D, MinIdPower(1.0), GridSpec.for_measure(D, 17))
        lines = cert.to_csv().strip().splitlines()
        assert len(lines) == 18


class TestSandwich:
    def test_zero(self):
        iv = lp_sandwich(zero(), 0.5)
        assert (iv.lower, iv.upper) == (0.0, 0.0)

    def test_contains_h1_value(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", GapNotReached)
            iv = lp_sandwich(D, 1.0, max_points=257)
        assert iv.lower - 1e-12 <= (NU3_N - 1) / 6 + 1e-6 or iv.lower >= (NU3_N - 1) / 6
        assert iv.lower <= iv.upper == pytest.approx((1 + NU3_N) / 6)

    def test_gap_warning(self):
        with pytest.warns(GapNotReached):
            iv = lp_sandwich(D, 0.5, target_gap=1e-3, max_points=129)
        assert "gap_not_reached" in iv.flags

    def test_delta_ordering_of_uppers(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", GapNotReached)
            a = lp_sandwich(D, 0.0, max_points=129)
            b = lp_sandwich(D, 1.0, max_points=129)
        assert a.upper <= b.upper and "heuristic_lower" in a.flags


class TestZeta1Analogue:
    @pytest.mark.parametrize("seed", range(6))
    def test_discrete_within_two_percent(self, seed):
        m = random_m22(np.random.default_rng(seed), gaussian=False)
        est = zeta1_lp(m, GridSpec.for_measure(m, 1025)).objective
        ex = mt.zeta1_exact(m)
        assert est <= ex + 1e-12
        assert abs(est - ex) <= 0.02 * ex
