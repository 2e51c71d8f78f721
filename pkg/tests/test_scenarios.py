import math

import numpy as np
import pytest

from zetaclt import families as fm
from zetaclt.errors import BadParams, ResourceCap
from zetaclt.measure import moments, normal, standardize, variation_nu0
from zetaclt.scenarios import (SHARPNESS_LIMIT, CounterexampleConfig, counterexample_path, counterexample_values,
                               run_clt_scan, run_sharpness_2327, sharpening_comparison, sharpness_ok)


class TestFamilies:
    def test_q_t(self):
        assert fm.q_t(2.0).atoms == [(-2.0, 0.125), (0.0, 0.75), (2.0, 0.125)]
        mv = moments(fm.q_t(7.0), 2)
        assert mv.mu1 == 0.0 and mv.sigma == pytest.approx(1.0, abs=1e-15)

    def test_sharpness_at_one(self):
        # the +-2/3 atoms carry weight (1 - eps)/2 = 0 and are dropped
        assert fm.sharpness_2327(1.0).atoms == [(-1.0, 0.5), (1.0, 0.5)]
        assert [x for x, _ in fm.sharpness_2327(0.5).atoms][1:3] == pytest.approx([-2 / 3, 2 / 3])

    @pytest.mark.parametrize("eps", [1.0, 0.1, 1e-3])
    def test_sharpness_is_standard(self, eps):
        p = fm.sharpness_2327(eps)
        assert variation_nu0(standardize(p) - p) < 1e-12

    def test_rademacher(self):
        assert fm.rademacher().atoms == [(-1.0, 0.5), (1.0, 0.5)]

    def test_parse(self):
        f = fm.LawFamily.parse("two_point:0.1,1")
        assert f.gen().atoms == [(0.0, 0.9), (1.0, 0.1)] and f.label == "two_point:0.1,1"
        with pytest.raises(BadParams):
            fm.LawFamily.parse("nope:1")
        with pytest.raises(BadParams):
            fm.LawFamily.parse("q_t:1,2")

    @pytest.mark.parametrize("bad", [lambda: fm.q_t(0.5), lambda: fm.two_point(1.5, 1.0),
                                     lambda: fm.lattice_uniform(1), lambda: fm.sharpness_2327(0.0)])
    def test_ranges(self, bad):
        with pytest.raises(BadParams):
            bad()


class TestSharpness:
    def test_values(self):
        rows = run_sharpness_2327([1.0, 0.1, 0.01, 0.001, 1e-4])
        assert rows[0][2] == pytest.approx(1.0, abs=1e-14)
        assert rows[2][2] == pytest.approx(0.853333333333333333, abs=1e-13)
        assert all(r[4] <= 1e-12 for r in rows)
        assert sharpness_ok(rows)
        assert abs(rows[-1][2] - SHARPNESS_LIMIT) < 1e-3


class TestCounterexample:
    def test_lower_bound_example(self):
        v = counterexample_values(CounterexampleConfig(0.1, 0.01, 1e4))
        assert v["lower_certified"] == pytest.approx((10 - 4 / math.sqrt(2 * math.pi)) / 6, rel=1e-12)
        # independent mpmath quadrature of int f(a x) d(Q_t - N)
        assert v["lower_direct"] == pytest.approx(1.66640070514639904488, rel=1e-10)
        assert v["lower_direct"] >= v["lower_certified"]

    def test_limit(self):
        assert CounterexampleConfig(0.1, 0.01, 1e4).limit == pytest.approx(1 / 0.307, rel=1e-12)

    def test_upper_closed_form_dominates_direct(self):
        v = counterexample_values(CounterexampleConfig(0.2, 0.5, 1e3))
        assert v["upper_direct"] <= v["upper_closed_form"]

    def test_ratio_converges(self):
        ratios = [counterexample_values(CounterexampleConfig(0.1, 0.01, t))["ratio"] for t in (1e3, 1e5, 1e7)]
        lim = CounterexampleConfig(0.1, 0.01, 1e3).limit
        errs = [abs(r - lim) for r in ratios]
        assert errs[0] > errs[1] > errs[2]

    def test_unbounded(self):
        cfg = counterexample_path(20.0)
        assert counterexample_values(cfg)["ratio"] > 20.0

    def test_config_checks(self):
        with pytest.raises(BadParams):
            CounterexampleConfig(0.1, 0.01, 50.0)
        with pytest.raises(BadParams):
            CounterexampleConfig(1.5, 0.01, 50.0)


class TestScan:
    def test_small_scan(self):
        res = run_clt_scan(families=[fm.LawFamily("rademacher"), fm.LawFamily("q_t", (3.0,))], deltas=(0.0, 1.0),
                           n_max=6)
        assert res.violations == 0
        row = next(r for r in res.rows if r[0] == "rademacher" and r[2] == 2 and r[3] == "katz")
        assert row[4] == pytest.approx(0.25, abs=1e-14)

    def test_normal_family_all_zero(self):
        res = run_clt_scan(families=[fm.LawFamily("normal")], deltas=(0.5,), n_max=3)
        assert all(abs(r[4]) < 1e-12 for r in res.rows)
        zeta_based = [r for r in res.rows if r[3] in ("thm11", "thm12a", "thm12b")]
        assert zeta_based and all(abs(r[6]) < 1e-9 for r in zeta_based)

    def test_cap(self):
        with pytest.raises(ResourceCap):
            run_clt_scan(n_max=300)

    def test_deterministic(self):
        a = run_clt_scan(families=[fm.LawFamily("two_point", (0.1, 1.0))], deltas=(0.5,), n_max=5).rows
        b = run_clt_scan(families=[fm.LawFamily("two_point", (0.1, 1.0))], deltas=(0.5,), n_max=5).rows
        assert a == b

    def test_sharpening_small(self):
        rows = sharpening_comparison(n_range=range(2, 6))
        assert all(r[4] for r in rows)
