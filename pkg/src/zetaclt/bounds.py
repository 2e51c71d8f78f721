"""Right-hand sides of the normal-approximation bounds, judged against exact left sides.

Every bound is of the form distance(standardised n-fold sum, N) <= rhs, where
the distance is the Kolmogorov norm or zeta_1 and is computed exactly. A
right side that depends on zeta_{2,delta} is an interval, because that norm
is only known up to a certified sandwich.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from . import _numerics as nx
from .constants import BETA, C2_KATZ, THM11_C, alpha, gamma, omega
from .errors import DegenerateLaw, InadmissibleParams, NotALaw, ZetaTooLarge
from .gfun import GFun
from .measure import SignedMeasure, convolve, normal, nu, nu_mg, scale, standardize
from .metrics import h_delta, kolmogorov, zeta1_exact, zeta2delta_interval
from .report import BoundReport, EstimateInterval

ETA_MAX = 1e8
ETA_SCAN = 64


def require_law(p: SignedMeasure) -> None:
    if abs(p.total_mass() - 1.0) > 1e-12:
        raise NotALaw(f"total mass {p.total_mass()!r} != 1")
    if np.any(p.atom_weights < 0) or np.any(p.g_weights < 0):
        raise NotALaw("negative weights: not a probability law")


class LawContext:
    """Caches everything derived from one law P: its standardisation, the
    difference D = P~ - N, norms of D, and the standardised convolution powers."""

    def __init__(self, p: SignedMeasure, name: str = ""):
        require_law(p)
        self.law = p
        self.name = name
        self.tilde = standardize(p)
        self.diff = self.tilde - normal()
        self._powers = [None, self.tilde]
        self._cache = {}

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    # quantities of P~ and D = P~ - N
    def nu(self, r: float) -> float:
        return self._memo(("nu", float(r)), lambda: nu(self.tilde, r))

    def nu_mg(self, g: GFun) -> float:
        return self._memo(("nu_mg", str(g)), lambda: nu_mg(self.tilde, 2, g))

    def zeta1(self) -> float:
        return self._memo("zeta1", lambda: zeta1_exact(self.diff))

    def kolmogorov(self) -> float:
        return self._memo("kolm", lambda: kolmogorov(self.diff))

    def zeta2(self, delta: float) -> EstimateInterval:
        return self._memo(("zeta2", float(delta)), lambda: zeta2delta_interval(self.diff, delta))

    # the n-fold sum
    def power(self, n: int) -> SignedMeasure:
        """P~^{*n} (unnormalised), built incrementally."""
        while len(self._powers) <= n:
            self._powers.append(convolve(self._powers[-1], self.tilde))
        return self._powers[n]

    def sum_diff(self, n: int) -> SignedMeasure:
        """Law of the standardised n-fold sum minus N."""
        return scale(self.power(n), 1.0 / math.sqrt(n)) - normal()

    def lhs_kolmogorov(self, n: int) -> float:
        return self._memo(("lhsK", n), lambda: kolmogorov(self.sum_diff(n)))

    def lhs_zeta1(self, n: int) -> float:
        return self._memo(("lhsZ", n), lambda: zeta1_exact(self.sum_diff(n)))

    def release(self, n: int) -> None:
        """Drop cached powers below n (scans only need the latest)."""
        for k in range(2, min(n, len(self._powers))):
            self._powers[k] = None


def as_context(p) -> LawContext:
    if isinstance(p, LawContext):
        return p
    try:
        return LawContext(p)
    except ZeroDivisionError as exc:  # pragma: no cover - defensive
        raise DegenerateLaw(str(exc)) from exc


def _n_factor(n: int, delta: float) -> float:
    return float(n) ** (-delta / 2.0)


# -- classical bounds ---------------------------------------------------------------


def katz_bound(p, g: GFun, n: int, c: float = C2_KATZ) -> BoundReport:
    """Kolmogorov distance <= c nu_{2,g}(P~) / g(sqrt n)."""
    ctx = as_context(p)
    rhs = c * ctx.nu_mg(g) / float(g(math.sqrt(n)))
    return BoundReport.judge("katz", ctx.lhs_kolmogorov(n), rhs, params={"n": n, "g": str(g), "c": c})


def lyapunov_katz(p, delta: float, n: int, c: float = C2_KATZ) -> BoundReport:
    """Kolmogorov distance <= c nu_{2+delta}(P~) / n^{delta/2}."""
    ctx = as_context(p)
    rhs = c * ctx.nu(2.0 + delta) * _n_factor(n, delta)
    return BoundReport.judge("lyapunov_katz", ctx.lhs_kolmogorov(n), rhs, params={"delta": delta, "n": n, "c": c})


def thm11_bound(p, delta: float, n: int, c: float = THM11_C) -> BoundReport:
    """Kolmogorov distance <= c/n^{delta/2} max(zeta_1, zeta_{2,delta})(P~ - N), n >= 2."""
    if n < 2:
        raise InadmissibleParams("this bound is stated for n >= 2")
    ctx = as_context(p)
    z1, z2 = ctx.zeta1(), ctx.zeta2(delta)
    f = c * _n_factor(n, delta)
    note = "zeta2 lower heuristic" if "heuristic_lower" in z2.flags else ""
    return BoundReport.judge("thm11", ctx.lhs_kolmogorov(n), f * max(z1, z2.lower), f * max(z1, z2.upper),
                             params={"delta": delta, "n": n, "c": c}, note=note)


def senatov_bound(p, delta: float, n: int, c: float = THM11_C) -> BoundReport:
    """Kolmogorov distance <= c/n^{delta/2} max(||.||_K, zeta_1, zeta_{2,delta})(P~ - N)."""
    ctx = as_context(p)
    k, z1, z2 = ctx.kolmogorov(), ctx.zeta1(), ctx.zeta2(delta)
    f = c * _n_factor(n, delta)
    return BoundReport.judge("senatov", ctx.lhs_kolmogorov(n), f * max(k, z1, z2.lower), f * max(k, z1, z2.upper),
                             params={"delta": delta, "n": n, "c": c})


# -- the recursion bound ----------------------------------------------------------------


def g_delta(eta, delta: float):
    eta = np.asarray(eta, dtype=float)
    return 2.0 * (1.0 + eta ** 2) ** ((1.0 - delta) / 2.0) / eta


def xi_delta(delta: float, kappa: float, zeta: float) -> float:
    """inf over admissible eta > 0 of (kappa + alpha zeta + beta eta) / (1 - gamma g(eta) zeta).

    g(eta) decreases in eta, so the admissible set is a half line (eta_0, inf).
    A 64-point log scan brackets the minimum, golden section on log eta refines it.
    """
    if kappa < 0 or zeta < 0 or not (math.isfinite(kappa) and math.isfinite(zeta)):
        raise ValueError("xi needs finite nonnegative arguments")
    if zeta == 0.0:
        return float(kappa)
    a, b, gm = alpha(delta), BETA, gamma(delta)
    if delta == 0.0 and 2.0 * gm * zeta >= 1.0:
        return math.inf

    def cons(t):  # > 0 on the admissible set, t = log eta
        return 1.0 - gm * zeta * float(g_delta(math.exp(t), delta))

    t_hi = math.log(ETA_MAX)
    if cons(t_hi) <= 0.0:
        return math.inf
    t_lo = -700.0
    if cons(t_lo) <= 0.0:
        t_lo = brentq(cons, t_lo, t_hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    t_lo = t_lo + 1e-12 * (1.0 + abs(t_lo))

    def obj(t):
        den = cons(t)
        if den <= 0.0:
            return math.inf
        return (kappa + a * zeta + b * math.exp(t)) / den

    ts = np.linspace(t_lo, t_hi, ETA_SCAN)
    vals = np.array([obj(t) for t in ts])
    i = int(np.argmin(vals))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, ETA_SCAN - 1)]
    _, v = nx.golden_section(obj, lo, hi, rtol=1e-12)
    return float(min(v, vals[i]))


def thm12a_bound(p, delta: float, n: int) -> BoundReport:
    """zeta_1 distance <= xi_delta(zeta_1, zeta_{2,delta})(P~ - N) / n^{delta/2}."""
    ctx = as_context(p)
    z1, z2 = ctx.zeta1(), ctx.zeta2(delta)
    f = _n_factor(n, delta)
    lo = xi_delta(delta, z1, z2.lower) * f
    hi = xi_delta(delta, z1, z2.upper) * f
    return BoundReport.judge("thm12a", ctx.lhs_zeta1(n), lo, hi, params={"delta": delta, "n": n})


def thm12b_radius(theta: float, c: float) -> float:
    g0 = gamma(0.0)
    q = theta ** 2 / (4.0 * g0 ** 2) - 1.0 / c ** 2
    if not (0.0 < theta < 1.0 and c > 0.0 and q > 0.0):
        raise InadmissibleParams(f"(theta, c) = ({theta}, {c}) is not admissible")
    return math.sqrt(q)


def thm12b_bound(p, delta: float, n: int, theta: float = 0.9, c: float = 10.0) -> BoundReport:
    """zeta_1 distance <= (1 + alpha + beta c)/(1 - theta) max(zeta_1, zeta_{2,delta})(P~ - N) / n^{delta/2},
    provided zeta_{2,delta}(P~ - N) is at most the admissibility radius."""
    radius = thm12b_radius(theta, c)
    ctx = as_context(p)
    z1, z2 = ctx.zeta1(), ctx.zeta2(delta)
    if z2.upper > radius:
        raise ZetaTooLarge(f"zeta_2,delta upper estimate {z2.upper:.6g} exceeds radius {radius:.6g}")
    k = (1.0 + alpha(0.0) + BETA * c) / (1.0 - theta) * _n_factor(n, delta)
    return BoundReport.judge("thm12b", ctx.lhs_zeta1(n), k * max(z1, z2.lower), k * max(z1, z2.upper),
                             params={"delta": delta, "n": n, "theta": theta, "c": c}, extra={"radius": radius})


# -- chain checks ---------------------------------------------------------------------


def nu_to_zeta_check(p, delta: float) -> tuple:
    """nu_{2+delta}(P~) <= |int h d(P~ - N)| + int h dN, and int h dN <= omega."""
    ctx = as_context(p)
    h = lambda x: float(h_delta(x, delta))
    k = (1.0, -1.0, 0.0)
    test = abs(ctx.diff.integrate(h, kinks=k))
    normal_part = normal().integrate(h, kinks=k)
    lhs = ctx.nu(2.0 + delta)
    r1 = BoundReport.judge("nu_to_zeta", lhs, test + normal_part, params={"delta": delta},
                           extra={"L": test / ((1 + delta) * (2 + delta))})
    r2 = BoundReport.judge("h_normal_tail", normal_part, omega().computed, params={"delta": delta})
    return r1, r2


def closeness_chain_check(p, delta: float) -> tuple:
    """zeta_1(P~ - N) <= (1 + 2/sqrt(2 pi)) nu_{2+delta}(P~); zeta_{2,delta} upper <= (1/2 + 2/sqrt(2 pi)) nu_{2+delta}(P~)."""
    ctx = as_context(p)
    v = ctx.nu(2.0 + delta)
    r1 = BoundReport.judge("chain_zeta1", ctx.zeta1(), (1.0 + 2.0 / nx.SQRT2PI) * v, params={"delta": delta})
    r2 = BoundReport.judge("chain_zeta2", ctx.zeta2(delta).upper, (0.5 + 2.0 / nx.SQRT2PI) * v, params={"delta": delta})
    return r1, r2
