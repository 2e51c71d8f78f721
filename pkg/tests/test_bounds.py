import math

import numpy as np
import pytest

from zetaclt import bounds as bd
from zetaclt.constants import C2_KATZ, inverse_two_gamma
from zetaclt.errors import InadmissibleParams, NotALaw, ZetaTooLarge
from zetaclt.families import contaminated_normal, rademacher, two_point
from zetaclt.gfun import Clip, Power
from zetaclt.measure import dirac, normal

ZETA1_RAD = 0.535377321547879837652358834402


class TestClassical:
    def test_katz_example(self):
        r = bd.katz_bound(rademacher(), Power(1.0), 1)
        assert r.rhs_upper == pytest.approx(C2_KATZ, abs=1e-12)
        assert r.lhs == pytest.approx(0.3413447460685429, abs=1e-13) and r.valid

    def test_katz_uses_clip(self):
        ctx = bd.LawContext(rademacher())
        r = bd.katz_bound(ctx, Clip(2.0), 9)
        assert r.rhs_upper == pytest.approx(C2_KATZ * ctx.nu_mg(Clip(2.0)) / 2.0)

    def test_lyapunov_katz(self):
        assert bd.lyapunov_katz(rademacher(), 1.0, 4).rhs_upper == pytest.approx(0.9273, abs=1e-12)
        assert bd.lyapunov_katz(rademacher(), 0.0, 7).rhs_upper == pytest.approx(C2_KATZ, abs=1e-12)

    def test_normal_law_is_exact(self):
        for r in (bd.thm11_bound(normal(), 0.5, 4), bd.thm12a_bound(normal(), 0.5, 4),
                  bd.thm12b_bound(normal(), 0.5, 4), bd.senatov_bound(normal(), 0.5, 4)):
            assert r.lhs == pytest.approx(0.0, abs=1e-12) and r.rhs_upper == pytest.approx(0.0, abs=1e-12)

    def test_rejects_non_law(self):
        with pytest.raises(NotALaw):
            bd.LawContext(dirac(0.0, 0.5))


class TestThm11:
    def test_rademacher_n2(self):
        r = bd.thm11_bound(rademacher(), 1.0, 2)
        assert r.rhs_lower >= 48 / math.sqrt(2) * ZETA1_RAD * (1 - 1e-12)
        assert r.valid

    def test_n1_rejected(self):
        with pytest.raises(InadmissibleParams):
            bd.thm11_bound(rademacher(), 1.0, 1)

    def test_senatov_trivial_n1(self):
        assert bd.senatov_bound(rademacher(), 0.5, 1).valid


class TestXi:
    def test_zero_zeta(self):
        assert bd.xi_delta(0.3, 0.7, 0.0) == 0.7

    def test_infinite_region(self):
        z = inverse_two_gamma().computed
        assert bd.xi_delta(0.0, 1.0, z * 1.0001) == math.inf
        assert math.isfinite(bd.xi_delta(0.0, 1.0, z * 0.99))

    @pytest.mark.parametrize("kappa, zeta", [(0.1, 0.01), (0.5, 0.1), (1.0, 0.2)])
    def test_delta_ordering(self, kappa, zeta):
        x0 = bd.xi_delta(0.0, kappa, zeta)
        for d in (0.25, 0.5, 1.0):
            assert bd.xi_delta(d, kappa, zeta) <= x0 * (1 + 1e-9)

    def test_monotone_in_arguments(self):
        ks = np.linspace(0, 1, 6)
        zs = np.linspace(0.001, 0.25, 6)
        for d in (0.0, 0.5, 1.0):
            vals = np.array([[bd.xi_delta(d, k, z) for z in zs] for k in ks])
            assert np.all(np.diff(vals, axis=0) >= -1e-9) and np.all(np.diff(vals, axis=1) >= -1e-9)

    def test_is_infimum_of_grid(self):
        from zetaclt.constants import BETA, alpha, gamma
        d, k, z = 0.5, 0.3, 0.05
        eta = np.logspace(-4, 4, 20001)
        den = 1 - gamma(d) * z * bd.g_delta(eta, d)
        vals = np.where(den > 0, (k + alpha(d) * z + BETA * eta) / den, np.inf)
        xi = bd.xi_delta(d, k, z)
        assert xi <= vals.min() * (1 + 1e-9) and xi >= vals.min() * (1 - 1e-3)


class TestThm12b:
    def test_radius(self):
        from zetaclt.constants import gamma
        assert bd.thm12b_radius(0.9, 10.0) == pytest.approx(math.sqrt(0.81 / (4 * gamma(0.0) ** 2) - 0.01))

    def test_inadmissible(self):
        with pytest.raises(InadmissibleParams):
            bd.thm12b_radius(0.9, 1.0)

    def test_too_far_from_normal(self):
        with pytest.raises(ZetaTooLarge):
            bd.thm12b_bound(rademacher(), 0.5, 4)

    def test_dominates_12a(self):
        ctx = bd.LawContext(contaminated_normal(0.1, 2.0))
        for n in (2, 8, 32):
            assert bd.thm12b_bound(ctx, 1.0, n).rhs_upper >= bd.thm12a_bound(ctx, 1.0, n).rhs_upper


class TestChains:
    @pytest.mark.parametrize("delta", [0.0, 0.5, 1.0])
    def test_nu_to_zeta(self, delta):
        for r in bd.nu_to_zeta_check(two_point(0.1, 1.0), delta):
            assert r.valid

    def test_nu_to_zeta_identity_at_one(self):
        # h_1 = |x|^3, so nu_3(P~) = int h_1 d(P~ - N) + nu_3(N) exactly
        ctx = bd.LawContext(two_point(0.1, 1.0))
        signed = ctx.diff.integrate(lambda x: abs(x) ** 3, kinks=(0.0,))
        assert ctx.nu(3.0) == pytest.approx(signed + 4 / math.sqrt(2 * math.pi), abs=1e-12)
        r, _ = bd.nu_to_zeta_check(ctx, 1.0)
        assert r.valid and r.lhs == pytest.approx(ctx.nu(3.0))

    def test_nu_to_zeta_trivial_at_zero(self):
        r, _ = bd.nu_to_zeta_check(rademacher(), 0.0)
        assert r.lhs == pytest.approx(1.0) and r.rhs_upper == pytest.approx(1.0)

    def test_closeness(self):
        a, b = bd.closeness_chain_check(rademacher(), 1.0)
        assert a.valid and b.valid
        assert a.rhs_upper == pytest.approx(1 + 2 / math.sqrt(2 * math.pi))
