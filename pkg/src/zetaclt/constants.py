"""Explicit numerical constants of the sharpened Lyapunov-Katz theory.

Gaussian derivative integrals, the smoothing-recursion coefficients, the
convolution constant, the tail constant omega, the c(lambda) optimiser and
the lower bound on the universal constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.optimize import brentq

from . import _numerics as nx
from .errors import LambdaTooSmall

SQRT2PI = nx.SQRT2PI
E_HALF = math.exp(-0.5)

# closed forms of the Gaussian derivative integrals
D2 = 4.0 * E_HALF / SQRT2PI
D21 = (8.0 * E_HALF - 2.0) / SQRT2PI
D3 = (2.0 + 8.0 * math.exp(-1.5)) / SQRT2PI

BETA = 4.0 / SQRT2PI
C2_KATZ = 1.8546
THM11_C = 48.0


def alpha(delta: float = 0.0) -> float:
    a0 = (16.0 * E_HALF - 4.0) / SQRT2PI
    a1 = 4.0 * E_HALF / SQRT2PI
    return a0 ** (1.0 - delta) * a1 ** delta


def gamma(delta: float = 0.0) -> float:
    g0 = 8.0 * E_HALF / SQRT2PI
    g1 = (2.0 + 8.0 * math.exp(-1.5)) / SQRT2PI
    return g0 ** (1.0 - delta) * g1 ** delta


def c0_delta(delta: float) -> float:
    """Constant in the variation bound for M * N_sigma."""
    return (2.0 * D2) ** (1.0 - delta) * D3 ** delta


def c1_delta(delta: float) -> float:
    """Constant in the zeta_1 bound for M * N_sigma."""
    return (2.0 * D21) ** (1.0 - delta) * D2 ** delta


@dataclass(frozen=True)
class NamedConstant:
    name: str
    computed: float
    closed_form: Optional[float] = None
    paper_value: Optional[float] = None
    tolerance: float = 1e-8
    argument: Optional[float] = None

    @property
    def abs_err(self) -> float:
        ref = self.closed_form if self.closed_form is not None else self.paper_value
        return abs(self.computed - ref) if ref is not None else 0.0

    @property
    def printed_err(self) -> Optional[float]:
        return None if self.paper_value is None else abs(self.computed - self.paper_value)

    @property
    def ok(self) -> bool:
        return self.abs_err <= self.tolerance


def _abs_integral(f, roots) -> float:
    """int_R |f| for even integrands given the nonnegative sign-change points."""
    edges = [0.0] + sorted(roots) + [np.inf]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += abs(integrate.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)[0])
    return 2.0 * total


def d_constants() -> list:
    phi = lambda z: math.exp(-0.5 * z * z) / SQRT2PI
    d2 = _abs_integral(lambda z: (z * z - 1.0) * phi(z), [1.0])
    d21 = _abs_integral(lambda z: z * (z * z - 1.0) * phi(z), [1.0])
    d3 = _abs_integral(lambda z: (z ** 3 - 3.0 * z) * phi(z), [math.sqrt(3.0)])
    return [
        NamedConstant("D2", d2, D2, 0.967882),
        NamedConstant("D21", d21, D21, 1.13788),
        NamedConstant("D3", d3, D3, 1.510013),
    ]


def c1_conv() -> NamedConstant:
    closed = math.sqrt(3.0) * (2.0 ** -0.25 + 1.0) ** 2 / (2.0 * SQRT2PI)
    # the same number assembled as the sqrt(3)/(2 sqrt(2 pi)) prefactor times the squared sum
    pre = math.sqrt(3.0) / (2.0 * SQRT2PI)
    computed = pre * (1.0 + 2.0 * 2.0 ** -0.25 + 2.0 ** -0.5)
    return NamedConstant("c1", computed, closed, 1.1708, tolerance=1e-4)


def omega() -> NamedConstant:
    computed = 25.0 / 24.0 * BETA + 4.0 / 27.0
    closed = 25.0 / 6.0 / SQRT2PI + 4.0 / 27.0
    return NamedConstant("omega", computed, closed, None, tolerance=1e-12)


def inverse_two_gamma() -> NamedConstant:
    """Threshold of zeta above which the delta = 0 recursion bound is infinite."""
    return NamedConstant("inv_2gamma0", 1.0 / (2.0 * gamma(0.0)), None, 0.2582, tolerance=1e-4)


def quartic_coefficients(lam: float) -> dict:
    """A..E of A/(1 - B sqrt(z^2 + C)) = D + E/z."""
    c1 = c1_conv().computed
    return {
        "A": c1 * (1.0 + alpha(0.0) + BETA * lam) / C2_KATZ,
        "B": 2.0 * gamma(0.0),
        "C": lam ** -2,
        "D": 6.0,
        "E": omega().computed,
    }


def crossing(lam: float) -> tuple:
    """(zeta*, value) at the unique crossing of the two branches."""
    if not lam > 2.0 * gamma(0.0):
        raise LambdaTooSmall(f"lambda must exceed 2*gamma = {2.0 * gamma(0.0):.6f}")
    k = quartic_coefficients(lam)
    A, B, C, D, E = k["A"], k["B"], k["C"], k["D"], k["E"]
    z_sing = math.sqrt(1.0 / B ** 2 - C)

    def h(z):
        # 1 - B sqrt(z^2 + C) rewritten without cancellation near z_sing
        den = B * B * (z_sing - z) * (z_sing + z) / (1.0 + B * math.sqrt(z * z + C))
        return A / den - (D + E / z)

    lo, hi = z_sing * 1e-14, z_sing * (1.0 - 1e-14)
    z = brentq(h, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return z, C2_KATZ * (D + E / z)


def c_of_lambda(lam: float) -> NamedConstant:
    z, val = crossing(lam)
    printed = 47.10171 if lam == 8.5 else None
    return NamedConstant(f"c({lam:g})", val, None, printed, tolerance=1e-3, argument=lam)


def optimize_c(lam_max: float = 100.0, scan_points: int = 128) -> NamedConstant:
    """inf over lambda in (2 gamma, lam_max] of c(lambda): log-scan then golden section."""
    lo = 2.0 * gamma(0.0) * (1.0 + 1e-6)
    logs = np.linspace(math.log(lo), math.log(lam_max), scan_points)
    vals = np.array([crossing(math.exp(t))[1] for t in logs])
    i = int(np.argmin(vals))
    a, b = logs[max(i - 1, 0)], logs[min(i + 1, scan_points - 1)]
    t, v = nx.golden_section(lambda t: crossing(math.exp(t))[1], a, b, rtol=1e-12)
    return NamedConstant("inf_c", v, None, None, tolerance=1e-9, argument=math.exp(t))


def lower_bound_c1(delta: float = 1.0) -> NamedConstant:
    base = math.sqrt(2.0) * (15.0 + 6.0 * math.sqrt(3.0)) / (13.0 * SQRT2PI)
    val = math.sqrt(2.0) ** (delta - 1.0) * base
    printed = 1.1020 if delta == 1.0 else None
    return NamedConstant(f"lower_c(delta={delta:g})", val, None, printed, tolerance=1e-4, argument=delta)


def all_constants() -> list:
    out = d_constants()
    out.append(NamedConstant("alpha0", alpha(0.0), 2.0 * D21, None, tolerance=1e-12))
    out.append(NamedConstant("beta", BETA, 4.0 / SQRT2PI, 1.59577, tolerance=1e-12))
    out.append(NamedConstant("gamma0", gamma(0.0), 2.0 * D2, None, tolerance=1e-12))
    out.append(NamedConstant("two_gamma0", 2.0 * gamma(0.0), None, 3.87153, tolerance=1e-5))
    out.append(inverse_two_gamma())
    out.append(NamedConstant("alpha1", alpha(1.0), D2, None, tolerance=1e-12))
    out.append(NamedConstant("gamma1", gamma(1.0), D3, None, tolerance=1e-12))
    out.append(c1_conv())
    out.append(NamedConstant("c2", C2_KATZ, None, 1.8546, tolerance=0.0))
    out.append(omega())
    for key, val in quartic_coefficients(8.5).items():
        out.append(NamedConstant(f"quartic_{key}(8.5)", val, None, None, tolerance=0.0, argument=8.5))
    out.append(c_of_lambda(8.5))
    out.append(optimize_c())
    out.append(lower_bound_c1(1.0))
    out.append(lower_bound_c1(0.0))
    return out
