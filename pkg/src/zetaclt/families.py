"""Parametric laws used by the scenarios and scans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BadParams
from .measure import SignedMeasure, discrete, normal


def rademacher() -> SignedMeasure:
    return discrete([-1.0, 1.0], [0.5, 0.5])


def two_point(p: float, a: float) -> SignedMeasure:
    """(1 - p) delta_0 + p delta_a."""
    if not 0.0 < p < 1.0 or a == 0.0:
        raise BadParams("two_point needs 0 < p < 1 and a != 0")
    return discrete([0.0, a], [1.0 - p, p])


def lattice_uniform(k: int) -> SignedMeasure:
    """Uniform law on {0, 1, ..., k-1}."""
    if int(k) != k or k < 2:
        raise BadParams("lattice_uniform needs an integer k >= 2")
    k = int(k)
    return discrete(np.arange(k, dtype=float), np.full(k, 1.0 / k))


def q_t(t: float) -> SignedMeasure:
    """(1 - 1/t^2) delta_0 + (delta_{-t} + delta_t)/(2 t^2): mean 0, variance 1."""
    if not t >= 1.0 or not math.isfinite(t):
        raise BadParams("q_t needs t >= 1")
    w = 1.0 / (2.0 * t * t)
    return discrete([-t, 0.0, t], [w, 1.0 - 2.0 * w, w])


def contaminated_normal(eps: float, t: float) -> SignedMeasure:
    """(1 - eps) N + eps Q_t."""
    if not 0.0 < eps <= 1.0:
        raise BadParams("contaminated_normal needs 0 < eps <= 1")
    return normal() * (1.0 - eps) + q_t(t) * eps


def sharpness_2327(eps: float) -> SignedMeasure:
    """Atoms +-2/3 with weight (1-eps)/2 and +-a_eps with weight eps/2, a_eps = sqrt(5/eps + 4)/3."""
    if not 0.0 < eps <= 1.0:
        raise BadParams("sharpness family needs 0 < eps <= 1")
    a = math.sqrt(5.0 / eps + 4.0) / 3.0
    return discrete([-a, -2.0 / 3.0, 2.0 / 3.0, a], [eps / 2, (1 - eps) / 2, (1 - eps) / 2, eps / 2])


def sharpness_closed_form(eps: float) -> float:
    return (1.0 - eps) * 8.0 / 27.0 + (5.0 + 4.0 * eps) / 9.0


_BUILDERS = {
    "rademacher": (rademacher, 0),
    "two_point": (two_point, 2),
    "lattice_uniform": (lattice_uniform, 1),
    "contaminated_normal": (contaminated_normal, 2),
    "q_t": (q_t, 1),
    "sharpness_2327": (sharpness_2327, 1),
    "normal": (lambda: normal(), 0),
}


@dataclass(frozen=True)
class LawFamily:
    family: str
    params: tuple = field(default=())

    def __post_init__(self):
        if self.family not in _BUILDERS:
            raise BadParams(f"unknown family {self.family!r}")
        if len(self.params) != _BUILDERS[self.family][1]:
            raise BadParams(f"{self.family} takes {_BUILDERS[self.family][1]} parameters")

    def gen(self) -> SignedMeasure:
        fn = _BUILDERS[self.family][0]
        args = [int(p) if self.family == "lattice_uniform" else float(p) for p in self.params]
        return fn(*args)

    @property
    def label(self) -> str:
        if not self.params:
            return self.family
        return f"{self.family}:{','.join(f'{p:g}' for p in self.params)}"

    @classmethod
    def parse(cls, text: str) -> "LawFamily":
        """``rademacher``, ``two_point:0.1,1``, ``q_t:3`` and so on."""
        name, _, rest = text.strip().partition(":")
        try:
            params = tuple(float(x) for x in rest.split(",")) if rest.strip() else ()
        except ValueError as exc:
            raise BadParams(f"bad family parameters in {text!r}") from exc
        return cls(name.strip(), params)


DEFAULT_SCAN_FAMILIES = (
    LawFamily("rademacher"),
    LawFamily("two_point", (0.1, 1.0)),
    LawFamily("lattice_uniform", (5,)),
    LawFamily("contaminated_normal", (0.1, 2.0)),
    LawFamily("q_t", (3.0,)),
)
DEFAULT_DELTAS = (0.0, 0.25, 0.5, 0.75, 1.0)
