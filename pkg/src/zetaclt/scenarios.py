"""Scenario drivers: the 23/27 sharpness family, the scaling counterexample and
the bound-validity scan. Each returns plain rows ready for CSV output."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _numerics as nx
from .bounds import (LawContext, katz_bound, lyapunov_katz, senatov_bound, thm11_bound, thm12a_bound,
                     thm12b_bound)
from .errors import BadParams, InadmissibleParams, ResourceCap, ZetaTooLarge
from .families import DEFAULT_DELTAS, DEFAULT_SCAN_FAMILIES, LawFamily, q_t, sharpness_2327, sharpness_closed_form
from .gfun import ClipSlope, MinIdPower
from .measure import normal, nu_mg, standardize
from .metrics import f_clipslope, zeta1_exact

NU3_NORMAL = 4.0 / nx.SQRT2PI
SHARPNESS_LIMIT = 23.0 / 27.0

# -- 23/27 ---------------------------------------------------------------------------

SHARPNESS_COLUMNS = ["eps", "a_eps", "nu_2g1", "closed_form", "abs_diff", "excess_over_23_27"]


def run_sharpness_2327(eps_list) -> list:
    """nu_{2,g_1}(P~_eps) through the measure pipeline, with its closed form."""
    rows = []
    g1 = MinIdPower(0.0)
    for eps in eps_list:
        if not 0.0 < eps <= 1.0:
            raise BadParams("eps must lie in (0, 1]")
        p = standardize(sharpness_2327(eps))
        val = nu_mg(p, 2, g1)
        cf = sharpness_closed_form(eps)
        rows.append([eps, math.sqrt(5.0 / eps + 4.0) / 3.0, val, cf, abs(val - cf), val - SHARPNESS_LIMIT])
    return rows


def sharpness_ok(rows) -> bool:
    vals = [r[2] for r in rows]
    decreasing = all(a > b for a, b in zip(vals[:-1], vals[1:]))
    return decreasing and all(v > SHARPNESS_LIMIT for v in vals)


# -- counterexample -------------------------------------------------------------------


@dataclass(frozen=True)
class CounterexampleConfig:
    a: float
    kappa: float
    t: float
    lam: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.a <= 1.0 and 0.0 < self.kappa <= 1.0 and 0.0 < self.lam <= 1.0):
            raise BadParams("need a, kappa, lambda in (0, 1]")
        if not self.t >= self.a ** -2 * (1.0 - 1e-12):
            raise BadParams("need t >= 1/a^2")

    @property
    def b(self) -> float:
        return self.a * self.t

    @property
    def limit(self) -> float:
        return 1.0 / ((1.0 - self.kappa) * 3.0 * self.a + self.kappa)


COUNTEREXAMPLE_COLUMNS = ["a", "kappa", "t", "lambda", "b", "lower_direct", "lower_scaled_closed_form",
                          "lower_certified", "lower_certified_direct", "upper_closed_form", "upper_direct",
                          "zeta1_q_minus_n", "ratio", "ratio_direct_upper", "ratio_certified", "limit"]


def counterexample_values(cfg: CounterexampleConfig) -> dict:
    """Both sides of the scaling ratio for the pair (Q_t, g_{b,kappa}).

    lower: int f_{b,kappa}(a x) d(Q_t - N)(x), a lower value for zeta_{2,g}((Q_t - N)(./a));
           it equals a^3 (t - nu_3(N))/6 and dominates the certified (a^3 t - nu_3(N))/6
    upper: ((1-kappa) 3a + kappa) t + nu_3(N)) / 6 >= int f_{b,kappa} d|Q_t - N| >= zeta_{2,g}(Q_t - N)
    The ratio uses zeta_1 as the bounded companion norm and g(1/a) = 1/a (since b >= 1/a).
    """
    a, k, t, b = cfg.a, cfg.kappa, cfg.t, cfg.b
    g = ClipSlope(b, k)
    diff = q_t(t) - normal()
    absdiff = q_t(t) + normal()
    kinks = (-b / a, b / a, 0.0)
    f_scaled = lambda x: float(f_clipslope(a * x, b, k))
    lower = diff.integrate(f_scaled, kinks=kinks)
    # the certified bound term by term: int f(a.) dQ_t - int f dN, and int f(a.) dN <= int f dN since a <= 1
    f_plain = lambda x: float(f_clipslope(x, b, k))
    certified_direct = q_t(t).integrate(f_scaled) - normal().integrate(f_plain, kinks=(-b, b, 0.0))
    upper_direct = absdiff.integrate(lambda x: float(f_clipslope(x, b, k)), kinks=(-b, b, 0.0))
    upper_cf = (((1.0 - k) * 3.0 * a + k) * t + NU3_NORMAL) / 6.0
    z1 = zeta1_exact(diff)
    weight = a ** 2 / float(g(1.0 / a))
    denom = weight * max(upper_cf, z1)
    denom_direct = weight * max(upper_direct, z1)
    return {
        "a": a, "kappa": k, "t": t, "lambda": cfg.lam, "b": b,
        "lower_direct": lower,
        "lower_scaled_closed_form": a ** 3 * (t - NU3_NORMAL) / 6.0,
        "lower_certified": (a ** 3 * t - NU3_NORMAL) / 6.0,
        "lower_certified_direct": certified_direct,
        "upper_closed_form": upper_cf,
        "upper_direct": upper_direct,
        "zeta1_q_minus_n": z1,
        "ratio": lower / denom,
        "ratio_direct_upper": lower / denom_direct,
        "ratio_certified": max(certified_direct, 0.0) / denom,
        "limit": cfg.limit,
    }


def run_counterexample(cfg: CounterexampleConfig, t_values=None) -> list:
    """Rows along t -> infinity at fixed (a, kappa). The ratio is unchanged by lambda
    because P_{lambda,t} - N = lambda (Q_t - N)."""
    ts = t_values if t_values is not None else [cfg.t]
    rows = []
    for t in ts:
        v = counterexample_values(CounterexampleConfig(cfg.a, cfg.kappa, t, cfg.lam))
        rows.append([v[c] for c in COUNTEREXAMPLE_COLUMNS])
    return rows


def counterexample_path(target: float, t: float = 1e8) -> CounterexampleConfig:
    """Smallest a = kappa on a halving path whose ratio exceeds ``target``."""
    a = 0.5
    while a > 1e-6:
        cfg = CounterexampleConfig(a, a, max(t, 4.0 / a ** 2))
        if counterexample_values(cfg)["ratio"] > target:
            return cfg
        a /= 2.0
    raise BadParams(f"target {target} not reached on the path")


# -- CLT scan ----------------------------------------------------------------------------

SCAN_BOUNDS = ("katz", "lyapunov_katz", "thm11", "thm12a", "thm12b", "senatov")


def _cell_reports(ctx: LawContext, delta: float, n: int, thm11_c: float, senatov_c: float):
    out = [katz_bound(ctx, MinIdPower(delta), n), lyapunov_katz(ctx, delta, n)]
    skipped = []
    if n >= 2:
        out.append(thm11_bound(ctx, delta, n, c=thm11_c))
    out.append(thm12a_bound(ctx, delta, n))
    try:
        out.append(thm12b_bound(ctx, delta, n))
    except (ZetaTooLarge, InadmissibleParams):
        skipped.append("thm12b")
    out.append(senatov_bound(ctx, delta, n, c=senatov_c))
    return out, skipped


@dataclass
class ScanResult:
    rows: list
    reports: list
    skipped: dict
    summary: dict

    @property
    def violations(self) -> int:
        return sum(1 for r in self.reports if not r.valid)


SCAN_COLUMNS = ["family", "delta", "n", "bound", "lhs", "rhs_lower", "rhs_upper", "valid", "tight", "tightness"]


def run_clt_scan(families=DEFAULT_SCAN_FAMILIES, deltas=DEFAULT_DELTAS, n_max: int = 64, n_min: int = 1,
                 thm11_c: float = 48.0, senatov_c: float = 48.0) -> ScanResult:
    """Every bound for every (family, delta, n); rows ordered by that key."""
    if n_max > 256:
        raise ResourceCap("n_max is capped at 256")
    rows, reports = [], []
    skipped = {}
    for fam in families:
        fam = LawFamily.parse(fam) if isinstance(fam, str) else fam
        ctx = LawContext(fam.gen(), fam.label)
        for n in range(n_min, n_max + 1):
            for delta in deltas:
                reps, skip = _cell_reports(ctx, delta, n, thm11_c, senatov_c)
                for name in skip:
                    skipped[name] = skipped.get(name, 0) + 1
                for r in reps:
                    reports.append(r)
                    rows.append([fam.label, delta, n, r.bound_name, r.lhs, r.rhs_lower, r.rhs_upper,
                                 r.valid, r.tight, r.tightness])
            ctx.release(n)
    summary = {}
    for r in reports:
        s = summary.setdefault(r.bound_name, {"cells": 0, "violations": 0, "max_tightness": 0.0})
        s["cells"] += 1
        s["violations"] += int(not r.valid)
        if math.isfinite(r.tightness):
            s["max_tightness"] = max(s["max_tightness"], r.tightness)
    return ScanResult(rows, reports, skipped, summary)


def sharpening_comparison(eps: float = 0.01, t: float = 2.0, deltas=(0.5, 1.0), n_range=range(2, 33)) -> list:
    """thm11 upper right side against the Lyapunov-Katz right side on the contaminated normal."""
    ctx = LawContext(LawFamily("contaminated_normal", (eps, t)).gen())
    rows = []
    for delta in deltas:
        for n in n_range:
            a = thm11_bound(ctx, delta, n)
            b = lyapunov_katz(ctx, delta, n)
            rows.append([delta, n, a.rhs_upper, b.rhs_upper, a.rhs_upper < b.rhs_upper])
    return rows
