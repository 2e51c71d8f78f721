"""Moduli of continuity: increasing g on [0, inf) with g(u)/u nonincreasing.

Each variant except :class:`Min` is piecewise a sum of power terms, which gives
closed-form primitives

    g^(-m)(u) = int_0^u g(y) (u - y)^(m-1) / (m-1)! dy

by binomial expansion of the kernel. ``Min`` falls back to quadrature.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .errors import BadParams, ZeroAtOne

_CHECK_GRID = np.concatenate(([0.0], np.logspace(-6, 2, 999)))
_CHECK_TOL = 1e-12

# A piece is (left, right, ((coef, exponent), ...)) meaning sum coef*y**exponent on [left, right].
Piece = tuple


def _check_members(g: "GFun") -> None:
    u = _CHECK_GRID
    v = np.asarray(g(u), dtype=float)
    if not np.all(np.isfinite(v)) or np.any(v < 0):
        raise BadParams(f"{g} is not a nonnegative finite modulus")
    if not np.any(v > 0):
        raise BadParams(f"{g} vanishes identically")
    scale = 1.0 + np.abs(v[1:])
    if np.any(np.diff(v) < -_CHECK_TOL * scale):
        raise BadParams(f"{g} is not increasing")
    ratio = v[1:] / u[1:]
    if np.any(np.diff(ratio) > _CHECK_TOL * (1.0 + np.abs(ratio[1:]))):
        raise BadParams(f"{g}(u)/u is not decreasing")


class GFun:
    """Base class. Subclasses are frozen dataclasses."""

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape)
        for a, b, terms in self.pieces():
            mask = (u >= a) & (u <= b) if a == 0.0 else (u > a) & (u <= b)
            if np.any(mask):
                uu = u[mask]
                out[mask] = sum(c * uu ** p for c, p in terms)
        return out if out.ndim else float(out)

    def pieces(self) -> Optional[list]:
        raise NotImplementedError

    def kinks(self) -> tuple:
        ps = self.pieces()
        if ps is None:
            return ()
        return tuple(float(b) for _, b, _ in ps[:-1])

    @property
    def bounded(self) -> bool:
        raise NotImplementedError

    def primitive(self, m: int, u):
        """g^(-m)(u); m = 0 returns g(u)."""
        return primitive(self, m, u)

    def __post_init__(self):
        self._validate()
        _check_members(self)

    def _validate(self):
        pass


@dataclass(frozen=True)
class Power(GFun):
    """u -> u**delta, with u**0 = 1 everywhere (including u = 0)."""

    delta: float

    def _validate(self):
        if not 0.0 <= self.delta <= 1.0:
            raise BadParams("power exponent must lie in [0, 1]")

    def pieces(self):
        return [(0.0, np.inf, ((1.0, float(self.delta)),))]

    @property
    def bounded(self):
        return self.delta == 0.0

    def __str__(self):
        return f"power:{self.delta:g}"


@dataclass(frozen=True)
class MinIdPower(GFun):
    """u -> min(u, u**delta): linear below 1, power above."""

    delta: float

    def _validate(self):
        if not 0.0 <= self.delta <= 1.0:
            raise BadParams("power exponent must lie in [0, 1]")

    def pieces(self):
        return [(0.0, 1.0, ((1.0, 1.0),)), (1.0, np.inf, ((1.0, float(self.delta)),))]

    @property
    def bounded(self):
        return self.delta == 0.0

    def __str__(self):
        return f"minidpow:{self.delta:g}"


@dataclass(frozen=True)
class Clip(GFun):
    """u -> min(u, b)."""

    b: float

    def _validate(self):
        if not self.b >= 1.0 or not math.isfinite(self.b):
            raise BadParams("clip level must be >= 1")

    def pieces(self):
        return [(0.0, self.b, ((1.0, 1.0),)), (self.b, np.inf, ((float(self.b), 0.0),))]

    @property
    def bounded(self):
        return True

    def __str__(self):
        return f"clip:{self.b:g}"


@dataclass(frozen=True)
class ClipSlope(GFun):
    """u -> min(u, (1 - kappa) b + kappa u)."""

    b: float
    kappa: float

    def _validate(self):
        if not self.b > 0 or not math.isfinite(self.b):
            raise BadParams("clip level must be positive")
        if not 0.0 <= self.kappa <= 1.0:
            raise BadParams("slope must lie in [0, 1]")

    def pieces(self):
        b, k = float(self.b), float(self.kappa)
        return [(0.0, b, ((1.0, 1.0),)), (b, np.inf, (((1.0 - k) * b, 0.0), (k, 1.0)))]

    @property
    def bounded(self):
        return self.kappa == 0.0

    def __str__(self):
        return f"clipslope:{self.b:g},{self.kappa:g}"


@dataclass(frozen=True)
class Scaled(GFun):
    """u -> factor * inner(u)."""

    factor: float
    inner: GFun

    def _validate(self):
        if not self.factor > 0 or not math.isfinite(self.factor):
            raise BadParams("scale factor must be positive")

    def __call__(self, u):
        return self.factor * self.inner(u)

    def pieces(self):
        ps = self.inner.pieces()
        if ps is None:
            return None
        return [(a, b, tuple((self.factor * c, p) for c, p in terms)) for a, b, terms in ps]

    def kinks(self):
        return self.inner.kinks()

    @property
    def bounded(self):
        return self.inner.bounded

    def __str__(self):
        return f"scaled:{self.factor:g},{self.inner}"


@dataclass(frozen=True)
class Min(GFun):
    """Pointwise minimum of two members."""

    first: GFun
    second: GFun

    def __call__(self, u):
        return np.minimum(self.first(u), self.second(u))

    def pieces(self):
        return None

    def kinks(self):
        return tuple(sorted(set(self.first.kinks()) | set(self.second.kinks())))

    @property
    def bounded(self):
        return self.first.bounded or self.second.bounded

    def __str__(self):
        return f"min({self.first},{self.second})"


def _primitive_pieces(pieces, m: int, u: np.ndarray) -> np.ndarray:
    out = np.zeros(u.shape)
    fact = math.factorial(m - 1)
    for a, b, terms in pieces:
        top = np.minimum(u, b)
        live = top > a
        if not np.any(live):
            continue
        uu, tt = u[live], top[live]
        acc = np.zeros(uu.shape)
        for j in range(m):
            binom = math.comb(m - 1, j) * (-1) ** j
            for c, p in terms:
                e = p + j + 1.0
                acc += binom * c * uu ** (m - 1 - j) * (tt ** e - a ** e) / e
        out[live] += acc / fact
    return out


def primitive(g: GFun, m: int, u):
    """m-fold primitive of g vanishing with its first m-1 derivatives at 0."""
    if m < 0 or int(m) != m:
        raise BadParams("primitive order must be a natural number")
    m = int(m)
    scalar = np.ndim(u) == 0
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(u < 0):
        raise BadParams("primitive is defined on [0, inf)")
    if m == 0:
        out = np.asarray(g(u), dtype=float)
    else:
        ps = g.pieces()
        if ps is not None:
            out = _primitive_pieces(ps, m, u)
        else:
            fact = math.factorial(m - 1)
            out = np.empty(u.shape)
            for i, x in enumerate(u):
                pts = [k for k in g.kinks() if 0 < k < x]
                f = lambda y, x=x: float(g(y)) * (x - y) ** (m - 1)
                out[i] = integrate.quad(f, 0.0, x, points=pts or None, epsabs=1e-13, epsrel=1e-12, limit=200)[0] / fact if x > 0 else 0.0
    return float(out[0]) if scalar else out


def normalize(g: GFun) -> GFun:
    """Rescale so that g(1) = 1."""
    v = float(g(1.0))
    if not v > 0:
        raise ZeroAtOne(f"{g} vanishes at 1")
    if v == 1.0:
        return g
    inner, factor = (g.inner, g.factor / v) if isinstance(g, Scaled) else (g, 1.0 / v)
    if abs(factor - 1.0) <= 1e-15:
        return inner
    return Scaled(factor, inner)


_NUM = re.compile(r"\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*")


def parse_g(text: str) -> GFun:
    """Parse ``power:0.5``, ``minidpow:0.5``, ``clip:2``, ``clipslope:2,0.25``,
    ``scaled:3,clip:2`` or ``min(clip:2,power:1)``."""
    g, rest = _parse(text.strip())
    if rest.strip():
        raise BadParams(f"trailing input in modulus text: {rest!r}")
    return g


def _number(s: str):
    mt = _NUM.match(s)
    if not mt:
        raise BadParams(f"expected a number at {s!r}")
    return float(mt.group(1)), s[mt.end():]


def _expect(s: str, ch: str) -> str:
    s = s.lstrip()
    if not s.startswith(ch):
        raise BadParams(f"expected {ch!r} at {s!r}")
    return s[1:]


def _parse(s: str):
    s = s.lstrip()
    if s.startswith("min("):
        g1, rest = _parse(s[4:])
        g2, rest = _parse(_expect(rest, ","))
        return Min(g1, g2), _expect(rest, ")")
    name, sep, rest = s.partition(":")
    name = name.strip().lower()
    if not sep:
        raise BadParams(f"bad modulus text {s!r}")
    if name in ("power", "minidpow", "clip"):
        x, rest = _number(rest)
        cls = {"power": Power, "minidpow": MinIdPower, "clip": Clip}[name]
        return cls(x), rest
    if name == "clipslope":
        b, rest = _number(rest)
        k, rest = _number(_expect(rest, ","))
        return ClipSlope(b, k), rest
    if name == "scaled":
        lam, rest = _number(rest)
        inner, rest = _parse(_expect(rest, ","))
        return Scaled(lam, inner), rest
    raise BadParams(f"unknown modulus {name!r}")
