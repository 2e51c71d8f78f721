import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zetaclt.errors import BadParams
from zetaclt.gfun import Clip, ClipSlope, Min, MinIdPower, Power, Scaled, normalize, parse_g, primitive
from scipy import integrate

deltas = st.floats(0.0, 1.0)
pos = st.floats(1e-3, 1e2)


def members():
    return st.one_of(
        deltas.map(Power),
        deltas.map(MinIdPower),
        st.floats(1.0, 10.0).map(Clip),
        st.tuples(st.floats(0.1, 10.0), deltas).map(lambda t: ClipSlope(*t)),
        st.tuples(st.floats(0.1, 10.0), deltas).map(lambda t: Scaled(t[0], MinIdPower(t[1]))),
        st.tuples(st.floats(1.0, 5.0), deltas).map(lambda t: Min(Clip(t[0]), Power(t[1]))),
    )


class TestEvaluation:
    def test_examples(self):
        assert Clip(2.0)(3.0) == 2.0
        assert ClipSlope(1.0, 0.5)(3.0) == 2.0
        assert MinIdPower(0.5)(0.25) == 0.25

    def test_power_zero_is_constant(self):
        u = np.array([0.0, 1e-9, 1.0, 50.0])
        np.testing.assert_array_equal(Power(0.0)(u), np.ones(4))
        np.testing.assert_array_equal(MinIdPower(0.0)(u[1:]), Clip(1.0)(u[1:]))

    def test_rejects_out_of_class(self):
        with pytest.raises(BadParams):
            Power(1.5)
        with pytest.raises(BadParams):
            Clip(0.5)
        with pytest.raises(BadParams):
            ClipSlope(1.0, 2.0)


class TestPrimitive:
    def test_identity_cubic(self):
        assert primitive(Power(1.0), 2, 2.0) == pytest.approx(4 / 3, abs=1e-15)

    def test_clip_piecewise(self):
        assert primitive(Clip(1.0), 2, 2.0) == pytest.approx(7 / 6, abs=1e-15)

    def test_empty_integral(self):
        assert primitive(ClipSlope(2.0, 0.3), 1, 0.0) == 0.0

    def test_order_zero(self):
        assert primitive(MinIdPower(0.3), 0, 2.5) == MinIdPower(0.3)(2.5)

    def test_negative_argument(self):
        with pytest.raises(BadParams):
            primitive(Power(1.0), 2, -1.0)

    @pytest.mark.parametrize("g", [Power(0.4), MinIdPower(0.7), Clip(2.5), ClipSlope(1.5, 0.25),
                                   Scaled(2.0, MinIdPower(0.5))])
    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_closed_form_matches_quadrature(self, g, m):
        for u in (0.3, 1.0, 2.7, 9.0):
            ref = integrate.quad(lambda y: float(g(y)) * (u - y) ** (m - 1) / math.factorial(m - 1), 0, u,
                                 points=[p for p in g.kinks() if 0 < p < u] or None, epsabs=1e-14)[0]
            assert primitive(g, m, u) == pytest.approx(ref, rel=1e-11, abs=1e-13)

    @given(members(), pos, st.integers(1, 3))
    def test_bound(self, g, u, m):
        assert primitive(g, m, u) <= float(g(u)) * u ** m / math.factorial(m) * (1 + 1e-12) + 1e-15


class TestClassProperties:
    @given(members(), pos, pos)
    def test_subadditive(self, g, u, v):
        assert float(g(u + v)) <= float(g(u)) + float(g(v)) + 1e-12 * (1 + float(g(u + v)))

    @given(members(), pos, st.floats(1e-2, 1e2))
    def test_scaling(self, g, u, a):
        assert float(g(a * u)) <= max(1.0, a) * float(g(u)) * (1 + 1e-12)

    @given(deltas, deltas, pos)
    def test_minidpower_order(self, d1, d2, u):
        lo, hi = sorted((d1, d2))
        assert float(MinIdPower(lo)(u)) <= float(MinIdPower(hi)(u))


class TestNormalizeParse:
    def test_normalize(self):
        assert normalize(Clip(2.0)) == Clip(2.0)
        assert normalize(Scaled(3.0, Power(1.0))) == Power(1.0)
        assert normalize(Power(0.5)) == Power(0.5)

    @given(members())
    def test_normalized_value_at_one(self, g):
        assert float(normalize(g)(1.0)) == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("text", ["power:0.5", "minidpow:0.5", "clip:2", "clipslope:2,0.25",
                                      "scaled:3,clip:2", "min(clip:2,power:1)"])
    def test_roundtrip(self, text):
        g = parse_g(text)
        assert parse_g(str(g)) == g

    def test_parse_values(self):
        assert parse_g("scaled:3,clip:2")(5.0) == 6.0
        assert parse_g("min(clip:2,power:1)")(0.5) == 0.5

    @pytest.mark.parametrize("text", ["", "foo:1", "clip:", "min(clip:2", "power:2"])
    def test_parse_errors(self, text):
        with pytest.raises(BadParams):
            parse_g(text)
