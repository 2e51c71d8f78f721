import math
import time

import numpy as np
import pytest

from zetaclt import constants as cst


def by_name():
    return {c.name: c for c in cst.all_constants()}


class TestPrinted:
    @pytest.mark.parametrize("name, printed, places", [("D2", 0.967882, 6), ("D21", 1.13788, 5), ("D3", 1.510013, 6)])
    def test_d_constants(self, name, printed, places):
        c = by_name()[name]
        assert c.abs_err <= 1e-8
        # printed values are truncations
        assert 0 <= c.computed - printed < 10.0 ** -places

    def test_c1(self):
        c = cst.c1_conv()
        assert c.computed == pytest.approx(1.1708, abs=1e-4) and c.computed < cst.C2_KATZ

    def test_lower_bound(self):
        c = cst.lower_bound_c1(1.0)
        assert c.computed == pytest.approx(1.1020, abs=1e-4)
        assert cst.lower_bound_c1(0.0).computed == pytest.approx(c.computed / math.sqrt(2), abs=1e-14)

    def test_inverse_two_gamma(self):
        assert cst.inverse_two_gamma().computed == pytest.approx(0.2582, abs=1e-4)


class TestFormulas:
    def test_literal_formulas(self):
        e = math.exp(-0.5)
        r = math.sqrt(2 * math.pi)
        assert cst.alpha(0.0) == pytest.approx((16 * e - 4) / r, abs=1e-14)
        assert cst.BETA == pytest.approx(4 / r, abs=1e-15)
        assert cst.gamma(0.0) == pytest.approx(8 * e / r, abs=1e-14)

    def test_monotone_in_delta(self):
        ds = np.linspace(0, 1, 21)
        a = [cst.alpha(d) for d in ds]
        g = [cst.gamma(d) for d in ds]
        assert all(x >= y for x, y in zip(a, a[1:])) and all(x >= y for x, y in zip(g, g[1:]))

    def test_omega_components(self):
        assert cst.omega().computed == pytest.approx(cst.omega().closed_form, abs=1e-12)


class TestOptimizer:
    def test_c_at_8_5(self):
        assert cst.c_of_lambda(8.5).computed == pytest.approx(47.10171, abs=1e-3)

    def test_infimum(self):
        best = cst.optimize_c()
        assert best.computed <= cst.c_of_lambda(8.5).computed < 48
        again = cst.c_of_lambda(best.argument).computed
        assert abs(again - best.computed) <= 1e-9

    def test_above_branch_limit(self):
        for lam in (4.0, 8.5, 20.0, 80.0):
            assert cst.c_of_lambda(lam).computed > 6 * cst.C2_KATZ

    def test_continuity(self):
        lams = np.linspace(5, 15, 11)
        h = 1e-4
        diffs = [abs(cst.c_of_lambda(l + h).computed - cst.c_of_lambda(l).computed) / h for l in lams]
        assert max(diffs) < 50

    def test_runtime(self):
        t0 = time.perf_counter()
        cst.all_constants()
        assert time.perf_counter() - t0 < 5
