"""Randomised checks of every structural inequality the library relies on.

Each check draws its own instances from a seeded generator and returns the
worst margin lhs - rhs it saw (<= tolerance means pass).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import bounds as bd
from . import metrics as mt
from .gfun import Clip, ClipSlope, GFun, Min, MinIdPower, Power, Scaled, primitive
from .measure import (SignedMeasure, convolve, discrete, normal, power, scale, shift, standardize,
                      variation_nu0)
from .zeta_lp import GridSpec, lp_lower, zeta2_box_lp

TOL = 1e-12


@dataclass(frozen=True)
class PropertyResult:
    name: str
    seed: int
    passed: bool
    worst_margin: float
    checked: int
    seconds: float = 0.0


# -- random instances ------------------------------------------------------------------


def random_discrete_law(rng, k: int = 3, spread: float = 2.0) -> SignedMeasure:
    locs = rng.normal(0.0, spread, k)
    w = rng.dirichlet(np.ones(k))
    return discrete(locs, w)


def random_mixture_law(rng, k: int = 2, g: int = 1) -> SignedMeasure:
    w = rng.dirichlet(np.ones(k + g))
    return SignedMeasure.make(rng.normal(0, 1.5, k), w[:k], rng.normal(0, 1, g), rng.uniform(0.4, 1.5, g), w[k:])


def random_m22(rng, gaussian: bool | None = None) -> SignedMeasure:
    """A random element of M_{2,2}: a difference of two standardised laws, rescaled."""
    if gaussian is None:
        gaussian = bool(rng.integers(0, 2))
    p = standardize(random_discrete_law(rng, int(rng.integers(2, 5))))
    if gaussian:
        q = normal() if rng.random() < 0.5 else standardize(random_mixture_law(rng))
    else:
        q = standardize(random_discrete_law(rng, int(rng.integers(2, 5))))
    return (p - q) * float(rng.uniform(0.3, 1.5))


def random_g(rng) -> GFun:
    kind = int(rng.integers(0, 6))
    d = float(rng.uniform(0, 1))
    if kind == 0:
        return Power(d)
    if kind == 1:
        return MinIdPower(d)
    if kind == 2:
        return Clip(float(rng.uniform(1, 5)))
    if kind == 3:
        return ClipSlope(float(rng.uniform(0.2, 5)), d)
    if kind == 4:
        return Scaled(float(rng.uniform(0.1, 5)), MinIdPower(d))
    return Min(Clip(float(rng.uniform(1, 4))), Power(d))


def _pos(rng, size):
    return np.exp(rng.uniform(math.log(1e-3), math.log(1e2), size))


# -- modulus class ---------------------------------------------------------------------


def check_subadditivity(rng, samples):
    worst, count = -np.inf, 0
    for _ in range(8):
        g = random_g(rng)
        u, v = _pos(rng, samples // 8), _pos(rng, samples // 8)
        gu, gv, guv = g(u), g(v), g(u + v)
        worst = max(worst, float(np.max((guv - gu - gv) / (1.0 + guv))) - TOL)
        count += u.size
    return worst, count


def check_scaling(rng, samples):
    worst, count = -np.inf, 0
    for _ in range(8):
        g = random_g(rng)
        u = _pos(rng, samples // 8)
        a = np.exp(rng.uniform(-4, 4, u.size))
        lhs, rhs = g(a * u), np.maximum(1.0, a) * g(u)
        worst = max(worst, float(np.max((lhs - rhs) / (1.0 + rhs))) - TOL)
        count += u.size
    return worst, count


def check_primitive_bound(rng, samples):
    worst, count = -np.inf, 0
    for _ in range(8):
        g = random_g(rng)
        size = samples // 8 if not isinstance(g, Min) else 50
        u = _pos(rng, size) * 0.1
        for m in (1, 2, 3):
            lhs = primitive(g, m, u)
            rhs = g(u) * u ** m / math.factorial(m)
            worst = max(worst, float(np.max((lhs - rhs) / (1.0 + rhs))))
            count += u.size
    return worst, count


def check_minidpower_order(rng, samples):
    d1, d2 = np.sort(rng.uniform(0, 1, 2))
    u = np.concatenate(([0.0], _pos(rng, samples)))
    return float(np.max(MinIdPower(d1)(u) - MinIdPower(d2)(u))), u.size


# -- test functions -------------------------------------------------------------------


def check_h_membership(rng, samples):
    worst = -np.inf
    for delta in (0.0, 0.25, 0.5, 0.75, 1.0, float(rng.uniform())):
        x = rng.uniform(-6, 6, samples // 6)
        y = x + rng.normal(0, 1.5, x.size) * np.exp(rng.uniform(-6, 1, x.size))
        d = np.abs(x - y)
        lhs = np.abs(mt.h_delta_dd(x, delta) - mt.h_delta_dd(y, delta))
        rhs = (1 + delta) * (2 + delta) * np.minimum(d ** delta, d)
        worst = max(worst, float(np.max(lhs - rhs - TOL * (1 + rhs))))
    return worst, samples


def check_h_dominance(rng, samples):
    x = np.linspace(-20, 20, samples)
    worst = -np.inf
    for delta in (0.0, 0.25, 0.5, 0.75, 1.0, float(rng.uniform())):
        p = np.abs(x) ** (2 + delta)
        worst = max(worst, float(np.max(p - mt.h_delta(x, delta) - TOL * (1 + p))))
    return worst, 6 * samples


def check_fbk_identities(rng, samples):
    worst = -np.inf
    for _ in range(4):
        b, k = float(rng.uniform(0.2, 5)), float(rng.uniform(0, 1))
        d1, d2 = mt.f_clipslope_derivs(np.array([0.0]), b, k)
        worst = max(worst, abs(float(mt.f_clipslope(0.0, b, k))), abs(float(d1[0])), abs(float(d2[0])))
        x = rng.uniform(-4 * b, 4 * b, samples // 4)
        _, dd = mt.f_clipslope_derivs(x, b, k)
        g = ClipSlope(b, k)
        worst = max(worst, float(np.max(np.abs(dd - g(np.abs(x))))))
        prim = primitive(g, 2, np.abs(x))
        f = mt.f_clipslope(x, b, k)
        worst = max(worst, float(np.max(np.abs(prim - f) / (1 + np.abs(f)))) - 1e-12)
        # derivative identities by central differences
        hstep = 1e-4 * b
        fd1 = (mt.f_clipslope(x + hstep, b, k) - mt.f_clipslope(x - hstep, b, k)) / (2 * hstep)
        dr, _ = mt.f_clipslope_derivs(x, b, k)
        worst = max(worst, float(np.max(np.abs(fd1 - dr) / (1 + np.abs(dr)))) - 1e-6)
    return worst, samples


# -- measure algebra ----------------------------------------------------------------------


def _tv(a: SignedMeasure, b: SignedMeasure) -> float:
    return variation_nu0(a - b)


def check_convolution_algebra(rng, samples):
    worst = -np.inf
    for _ in range(10):
        p, q, r = (random_discrete_law(rng, 3) * float(rng.uniform(-1, 1)) for _ in range(3))
        worst = max(worst, _tv(convolve(p, q), convolve(q, p)) - 1e-14)
        worst = max(worst, _tv(convolve(convolve(p, q), r), convolve(p, convolve(q, r))) - 1e-14)
    return worst, 20


def ring_identity_rhs(p: SignedMeasure, q: SignedMeasure, n: int) -> SignedMeasure:
    d = p - q
    out = convolve(d, power(p, n - 1)) + convolve(d, power(q, n - 1)) * float(n - 1)
    for j in range(1, n - 1):
        out = out + convolve(convolve(power(p, n - j - 1) - power(q, n - j - 1), d), power(q, j))
    return out


def ring_identity_discrepancy(p: SignedMeasure, q: SignedMeasure, n: int) -> float:
    return _tv(power(p, n) - power(q, n), ring_identity_rhs(p, q, n))


def check_ring_identity(rng, samples, trials: int = 10, atoms: int = 3):
    worst = -np.inf
    for _ in range(trials):
        p, q = random_discrete_law(rng, atoms), random_discrete_law(rng, atoms)
        n = int(rng.integers(2, 7))
        worst = max(worst, ring_identity_discrepancy(p, q, n) - 1e-12)
    return worst, trials


def check_standardize(rng, samples):
    worst = -np.inf
    for _ in range(10):
        p = random_mixture_law(rng) if rng.random() < 0.5 else random_discrete_law(rng, 4)
        a, c = float(rng.uniform(0.2, 5)), float(rng.normal(0, 3))
        s1, s2 = standardize(p), standardize(shift(scale(p, a), c))
        worst = max(worst, _tv(s1, s2) - 1e-12)
        mv = s1.moments(2)
        worst = max(worst, abs(mv.mu1) - 1e-13, abs(mv.mu2 - 1.0) - 1e-13)
    return worst, 10


def check_variation_submultiplicative(rng, samples):
    worst = -np.inf
    for _ in range(10):
        m1 = random_discrete_law(rng, 3) - random_discrete_law(rng, 3)
        m2 = random_m22(rng) if rng.random() < 0.5 else random_discrete_law(rng, 2) * float(rng.uniform(-2, 2))
        lhs = variation_nu0(convolve(m1, m2))
        rhs = variation_nu0(m1) * variation_nu0(m2)
        worst = max(worst, lhs - rhs - 1e-10)
    return worst, 10


def check_kolmogorov_half_variation(rng, samples):
    worst = -np.inf
    for _ in range(10):
        p = random_mixture_law(rng) if rng.random() < 0.5 else random_discrete_law(rng, 3)
        q = random_discrete_law(rng, 3) if rng.random() < 0.5 else normal()
        m = p - q
        worst = max(worst, mt.kolmogorov(m) - variation_nu0(m) / 2 - 1e-10)
    return worst, 10


# -- metrics relations -----------------------------------------------------------------------


def check_regularity(rng, samples):
    worst = -np.inf
    for _ in range(6):
        m1 = random_discrete_law(rng, 3) - random_discrete_law(rng, 3)
        m2 = random_discrete_law(rng, 3) * float(rng.uniform(-2, 2))
        if rng.random() < 0.5:
            m2 = m2 + normal(float(rng.uniform(0.3, 2))) * float(rng.uniform(-1, 1))
        r = mt.verify_regularity(m1, m2, 1, Power(1.0))
        worst = max(worst, r.lhs - r.rhs_upper - 1e-10)
    return worst, 6


def check_homogeneity(rng, samples):
    worst = -np.inf
    for _ in range(6):
        m = random_mixture_law(rng) - random_discrete_law(rng, 3)
        r = mt.verify_homogeneity(m, float(np.exp(rng.uniform(-2.3, 2.3))))
        worst = max(worst, r.lhs - r.rhs_upper)
    return worst, 6


def check_smoothing(rng, samples):
    worst = -np.inf
    for _ in range(6):
        m = random_discrete_law(rng, 3) - (random_discrete_law(rng, 2) if rng.random() < 0.5 else normal())
        r = mt.verify_smoothing(m, float(np.exp(rng.uniform(-6, 1))))
        worst = max(worst, r.lhs - r.rhs_upper - 1e-10)
    return worst, 6


def check_mn_sigma(rng, samples):
    worst = -np.inf
    for sigma in (0.5, 2.0, float(rng.uniform(0.2, 3))):
        m = random_m22(rng)
        delta = float(rng.uniform())
        for r in mt.verify_mn_sigma(m, sigma, delta):
            worst = max(worst, r.lhs - r.rhs_upper - 1e-10)
    return worst, 6


def check_nu_to_zeta(rng, samples):
    worst = -np.inf
    for _ in range(3):
        p = random_discrete_law(rng, 3) if rng.random() < 0.5 else random_mixture_law(rng)
        for delta in (0.0, float(rng.uniform()), 1.0):
            for r in bd.nu_to_zeta_check(p, delta):
                worst = max(worst, r.lhs - r.rhs_upper - 1e-10)
    return worst, 9


def check_closeness_chain(rng, samples):
    worst = -np.inf
    for _ in range(3):
        p = random_discrete_law(rng, 3) if rng.random() < 0.5 else random_mixture_law(rng)
        for delta in (0.0, float(rng.uniform()), 1.0):
            for r in bd.closeness_chain_check(p, delta):
                worst = max(worst, r.lhs - r.rhs_upper - 1e-10)
    return worst, 9


def check_sandwich(rng, samples):
    worst = -np.inf
    for _ in range(4):
        m = random_m22(rng)
        uppers = []
        for delta in (0.0, 0.5, 1.0):
            lo, up = mt.zeta_lower_testfn(m, delta), mt.zeta2delta_upper(m, delta)
            worst = max(worst, lo - up - 1e-10)
            uppers.append(up)
        worst = max(worst, uppers[0] - uppers[1] - 1e-12, uppers[1] - uppers[2] - 1e-12)
    return worst, 4


def check_flat_below_zeta2(rng, samples):
    """LP for the bounded modulus 1 never beats the |f''| <= 1 box LP on the same grid."""
    worst = -np.inf
    for _ in range(2):
        m = random_m22(rng, gaussian=False)
        grid = GridSpec.for_measure(m, 129)
        flat = lp_lower(m, Power(0.0), grid).objective
        box = zeta2_box_lp(m, grid).objective
        worst = max(worst, flat - box - 1e-9)
    return worst, 2


def check_scaling_inequality(rng, samples):
    """lower(zeta_{2,delta}(M(./a))) <= (a^3 v a^{2+delta}) upper(zeta_{2,delta}(M))."""
    worst = -np.inf
    for _ in range(3):
        m = random_m22(rng)
        a = float(np.exp(rng.uniform(math.log(0.1), math.log(10))))
        delta = float(rng.uniform())
        lo = mt.zeta_lower_testfn(scale(m, a), delta)
        up = mt.zeta2delta_upper(m, delta)
        worst = max(worst, lo - max(a ** 3, a ** (2 + delta)) * up - 1e-10)
    return worst, 3


CHECKS = {
    "g_subadditivity": check_subadditivity,
    "g_scaling": check_scaling,
    "g_primitive_bound": check_primitive_bound,
    "minidpower_order": check_minidpower_order,
    "h_membership": check_h_membership,
    "h_dominance": check_h_dominance,
    "fbk_identities": check_fbk_identities,
    "convolution_algebra": check_convolution_algebra,
    "ring_identity": check_ring_identity,
    "standardize_affine": check_standardize,
    "variation_submultiplicative": check_variation_submultiplicative,
    "kolmogorov_half_variation": check_kolmogorov_half_variation,
    "regularity_zeta1": check_regularity,
    "homogeneity_zeta1": check_homogeneity,
    "smoothing": check_smoothing,
    "mn_sigma": check_mn_sigma,
    "nu_to_zeta": check_nu_to_zeta,
    "closeness_chain": check_closeness_chain,
    "sandwich_soundness": check_sandwich,
    "flat_below_zeta2": check_flat_below_zeta2,
    "scaling_inequality": check_scaling_inequality,
}

PROPERTY_COLUMNS = ["property", "seed", "passed", "worst_margin", "checked", "seconds"]


def run_property_suite(seeds=range(8), samples: int = 100_000, names=None) -> list:
    results = []
    for name in names or CHECKS:
        fn = CHECKS[name]
        for seed in seeds:
            rng = np.random.default_rng([int(seed), _stable_id(name)])
            t0 = time.perf_counter()
            worst, count = fn(rng, samples)
            results.append(PropertyResult(name, int(seed), bool(worst <= 0.0), float(worst), int(count),
                                          time.perf_counter() - t0))
    return results


def _stable_id(name: str) -> int:
    return sum((i + 1) * ord(ch) for i, ch in enumerate(name))


def perturbation_selftest(c: float = 0.1, n_max: int = 8) -> list:
    """Deliberately broken constant: the scan must flag invalid rows."""
    from .scenarios import run_clt_scan

    res = run_clt_scan(n_max=n_max, n_min=2, thm11_c=c)
    return [r for r in res.reports if r.bound_name == "thm11" and not r.valid]
