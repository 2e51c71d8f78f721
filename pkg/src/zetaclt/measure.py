"""Finite signed mixtures of point masses and Gaussian components.

A :class:`SignedMeasure` is ``sum_i a_i delta_{x_i} + sum_j w_j N(m_j, s_j^2)``
with arbitrary real weights. The family is closed under convolution,
scaling, shifting and linear combination, which is everything needed to
represent a law, its standardisation, the standard normal, their
differences and all convolution powers exactly.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

from . import _numerics as nx
from .errors import BadParams, DegenerateLaw, NotALaw, ResourceCap

MERGE_RTOL = 1e-12
DEFAULT_ATOM_CAP = 10_000_000
TAIL_SD = 12.0
QUAD_EPSABS = 1e-13
_CHUNK_PAIRS = 2_000_000


def _freeze(a) -> np.ndarray:
    arr = np.array(a, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


def _group_starts(sorted_vals: np.ndarray) -> np.ndarray:
    if sorted_vals.size == 0:
        return np.empty(0, dtype=int)
    gap = np.diff(sorted_vals) > MERGE_RTOL * (1.0 + np.abs(sorted_vals[:-1]))
    return np.concatenate(([0], np.nonzero(gap)[0] + 1))


def _merge_atoms(locs, weights):
    locs = np.asarray(locs, dtype=float).reshape(-1)
    weights = np.asarray(weights, dtype=float).reshape(-1)
    keep = weights != 0.0
    locs, weights = locs[keep], weights[keep]
    if locs.size == 0:
        return np.empty(0), np.empty(0)
    order = np.argsort(locs, kind="stable")
    locs, weights = locs[order], weights[order]
    starts = _group_starts(locs)
    locs = locs[starts]
    weights = np.add.reduceat(weights, starts)
    keep = weights != 0.0
    return locs[keep], weights[keep]


def _merge_gaussians(means, sds, weights):
    means = np.asarray(means, dtype=float).reshape(-1)
    sds = np.asarray(sds, dtype=float).reshape(-1)
    weights = np.asarray(weights, dtype=float).reshape(-1)
    keep = weights != 0.0
    means, sds, weights = means[keep], sds[keep], weights[keep]
    if means.size == 0:
        return np.empty(0), np.empty(0), np.empty(0)
    order = np.lexsort((means, sds))
    means, sds, weights = means[order], sds[order], weights[order]
    new_sd = np.concatenate(([True], np.diff(sds) > MERGE_RTOL * sds[:-1]))
    new_mean = np.concatenate(([True], np.diff(means) > MERGE_RTOL * (1.0 + np.abs(means[:-1]))))
    starts = np.nonzero(new_sd | new_mean)[0]
    means, sds = means[starts], sds[starts]
    weights = np.add.reduceat(weights, starts)
    keep = weights != 0.0
    return means[keep], sds[keep], weights[keep]


@dataclass(frozen=True)
class MomentVector:
    mu0: float
    mu1: float
    mu2: float
    mu3: float
    r: float
    nu_r: float
    sigma: float


@dataclass(frozen=True, eq=False)
class SignedMeasure:
    """Immutable atom/Gaussian mixture. Build through :meth:`make`."""

    atom_locs: np.ndarray
    atom_weights: np.ndarray
    g_means: np.ndarray
    g_sds: np.ndarray
    g_weights: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def make(cls, atom_locs=(), atom_weights=(), g_means=(), g_sds=(), g_weights=()):
        al = np.asarray(atom_locs, dtype=float).reshape(-1)
        aw = np.asarray(atom_weights, dtype=float).reshape(-1)
        gm = np.asarray(g_means, dtype=float).reshape(-1)
        gs = np.asarray(g_sds, dtype=float).reshape(-1)
        gw = np.asarray(g_weights, dtype=float).reshape(-1)
        if al.shape != aw.shape or not (gm.shape == gs.shape == gw.shape):
            raise BadParams("mismatched component arrays")
        for arr in (al, aw, gm, gs, gw):
            if not np.all(np.isfinite(arr)):
                raise BadParams("non-finite location or weight")
        if np.any(gs <= 0):
            raise BadParams("Gaussian standard deviations must be positive")
        al, aw = _merge_atoms(al, aw)
        gm, gs, gw = _merge_gaussians(gm, gs, gw)
        return cls(_freeze(al), _freeze(aw), _freeze(gm), _freeze(gs), _freeze(gw))

    @classmethod
    def from_lists(cls, atoms: Iterable[tuple] = (), gaussians: Iterable[tuple] = ()):
        atoms = list(atoms)
        gaussians = list(gaussians)
        al = [a[0] for a in atoms]
        aw = [a[1] for a in atoms]
        gm = [g[0] for g in gaussians]
        gs = [g[1] for g in gaussians]
        gw = [g[2] for g in gaussians]
        return cls.make(al, aw, gm, gs, gw)

    # -- basic views -------------------------------------------------------

    @property
    def n_atoms(self) -> int:
        return int(self.atom_locs.size)

    @property
    def n_gaussians(self) -> int:
        return int(self.g_means.size)

    @property
    def atoms(self) -> list:
        return list(zip(self.atom_locs.tolist(), self.atom_weights.tolist()))

    @property
    def gaussians(self) -> list:
        return list(zip(self.g_means.tolist(), self.g_sds.tolist(), self.g_weights.tolist()))

    @property
    def is_zero(self) -> bool:
        return self.n_atoms == 0 and self.n_gaussians == 0

    def total_mass(self) -> float:
        return math.fsum(self.atom_weights.tolist()) + math.fsum(self.g_weights.tolist())

    def hull(self, n_sd: float = TAIL_SD) -> tuple:
        """Smallest interval holding every atom and every Gaussian mean +- n_sd sd."""
        lo, hi = [], []
        if self.n_atoms:
            lo.append(self.atom_locs[0])
            hi.append(self.atom_locs[-1])
        if self.n_gaussians:
            lo.append(np.min(self.g_means - n_sd * self.g_sds))
            hi.append(np.max(self.g_means + n_sd * self.g_sds))
        if not lo:
            return (0.0, 0.0)
        return (float(min(lo)), float(max(hi)))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "SignedMeasure") -> "SignedMeasure":
        return SignedMeasure.make(
            np.concatenate((self.atom_locs, other.atom_locs)),
            np.concatenate((self.atom_weights, other.atom_weights)),
            np.concatenate((self.g_means, other.g_means)),
            np.concatenate((self.g_sds, other.g_sds)),
            np.concatenate((self.g_weights, other.g_weights)),
        )

    def __neg__(self) -> "SignedMeasure":
        return self * -1.0

    def __sub__(self, other: "SignedMeasure") -> "SignedMeasure":
        return self + (-other)

    def __mul__(self, c: float) -> "SignedMeasure":
        c = float(c)
        return SignedMeasure.make(self.atom_locs, c * self.atom_weights, self.g_means, self.g_sds, c * self.g_weights)

    __rmul__ = __mul__

    def __matmul__(self, other: "SignedMeasure") -> "SignedMeasure":
        return convolve(self, other)

    def __eq__(self, other) -> bool:
        """Exact equality of the normalised representations."""
        if not isinstance(other, SignedMeasure):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k))
                   for k in ("atom_locs", "atom_weights", "g_means", "g_sds", "g_weights"))

    __hash__ = None

    def __repr__(self) -> str:
        return f"SignedMeasure(atoms={self.n_atoms}, gaussians={self.n_gaussians}, mass={self.total_mass():.6g})"

    # -- continuous part ---------------------------------------------------

    def density(self, x) -> np.ndarray:
        """Density of the Gaussian part (atoms excluded)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        if not self.n_gaussians:
            return out
        flat = x.reshape(-1)
        res = np.zeros(flat.size)
        step = max(1, _CHUNK_PAIRS // max(self.n_gaussians, 1))
        for i in range(0, flat.size, step):
            z = (flat[i:i + step, None] - self.g_means) / self.g_sds
            res[i:i + step] = (nx.npdf(z) * (self.g_weights / self.g_sds)).sum(axis=1)
        return res.reshape(x.shape)

    def density_roots(self) -> np.ndarray:
        """Sign changes of the Gaussian-part density, located by bracketing.

        Empty when all Gaussian weights share a sign (no cancellation possible).
        """
        if "roots" in self._cache:
            return self._cache["roots"]
        w = self.g_weights
        if w.size == 0 or np.all(w > 0) or np.all(w < 0):
            roots = np.empty(0)
        else:
            big = np.abs(w) >= 1e-15 * np.max(np.abs(w))
            h = np.min(self.g_sds[big]) / 16.0
            lo, hi = self.hull()
            npts = int(min(200_001, max(2049, math.ceil((hi - lo) / h) + 1)))
            grid = np.union1d(np.linspace(lo, hi, npts), self.g_means[(self.g_means > lo) & (self.g_means < hi)])
            roots = nx.sign_change_roots(self.density, grid)
        roots.setflags(write=False)
        self._cache["roots"] = roots
        return roots

    def _gauss_mass(self, a: float, b: float) -> float:
        """Signed mass of the Gaussian part on [a, b]."""
        if not self.n_gaussians:
            return 0.0
        za = (a - self.g_means) / self.g_sds
        zb = (b - self.g_means) / self.g_sds
        left = nx.ncdf(zb) - nx.ncdf(za)
        right = nx.nsf(za) - nx.nsf(zb)
        mass = np.where(za > 0, right, left)
        return float(np.dot(self.g_weights, mass))

    def continuous_pieces(self) -> list:
        """Intervals between consecutive density sign changes, with the sign on each."""
        pts = np.concatenate(([-np.inf], self.density_roots(), [np.inf]))
        pieces = []
        for a, b in zip(pts[:-1], pts[1:]):
            m = self._gauss_mass(a, b)
            pieces.append((float(a), float(b), 1.0 if m >= 0 else -1.0))
        return pieces

    def _gauss_integral(self, f, a, b, kinks=()) -> float:
        """sum_j w_j * int_a^b f(x) phi_j(x) dx by adaptive quadrature per component."""
        total = 0.0
        for m, s, w in zip(self.g_means, self.g_sds, self.g_weights):
            za, zb = (a - m) / s, (b - m) / s
            if zb <= za:
                continue
            g = lambda z, m=m, s=s: f(m + s * z) * nx.INV_SQRT2PI * math.exp(-0.5 * z * z)
            lo, hi = max(za, -TAIL_SD), min(zb, TAIL_SD)
            val = 0.0
            if hi > lo:
                pts = [(k - m) / s for k in kinks]
                pts = sorted(p for p in pts if lo < p < hi)
                val += integrate.quad(g, lo, hi, points=pts or None, epsabs=QUAD_EPSABS, epsrel=1e-12, limit=200)[0]
            if za < -TAIL_SD:
                val += integrate.quad(g, za, min(zb, -TAIL_SD), epsabs=QUAD_EPSABS, limit=200)[0]
            if zb > TAIL_SD:
                val += integrate.quad(g, max(za, TAIL_SD), zb, epsabs=QUAD_EPSABS, limit=200)[0]
            total += w * val
        return total

    def integrate(self, f: Callable[[float], float], kinks: Sequence[float] = (), absolute: bool = False) -> float:
        """int f dM, or int f d|M| when ``absolute`` (f must then be >= 0).

        Atoms are summed exactly; the Gaussian part uses quadrature split at the
        density sign changes and at the given kinks of f.
        """
        if self.n_atoms:
            vals = np.array([f(x) for x in self.atom_locs], dtype=float)
            w = np.abs(self.atom_weights) if absolute else self.atom_weights
            atom_part = math.fsum((w * vals).tolist())
        else:
            atom_part = 0.0
        if not self.n_gaussians:
            return atom_part
        if not absolute:
            return atom_part + self._gauss_integral(f, -np.inf, np.inf, kinks)
        cont = 0.0
        for a, b, sgn in self.continuous_pieces():
            cont += sgn * self._gauss_integral(f, a, b, kinks)
        return atom_part + cont

    # -- distribution function ---------------------------------------------

    def cdf(self, x) -> np.ndarray:
        return cdf(self, x)

    def cdf_left(self, x) -> np.ndarray:
        """F_M(x-) = M(]-inf, x[)."""
        x = np.asarray(x, dtype=float)
        cum = np.concatenate(([0.0], np.cumsum(self.atom_weights)))
        out = cum[np.searchsorted(self.atom_locs, x, side="left")]
        return out + self._gauss_cdf(x)

    def _gauss_cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if not self.n_gaussians:
            return np.zeros(x.shape)
        flat = x.reshape(-1)
        res = np.zeros(flat.size)
        step = max(1, _CHUNK_PAIRS // self.n_gaussians)
        for i in range(0, flat.size, step):
            z = (flat[i:i + step, None] - self.g_means) / self.g_sds
            res[i:i + step] = (nx.ncdf(z) * self.g_weights).sum(axis=1)
        return res.reshape(x.shape)

    # -- convenience wrappers ----------------------------------------------

    def moments(self, r: float = 3.0) -> MomentVector:
        return moments(self, r)

    def standardize(self) -> "SignedMeasure":
        return standardize(self)

    def scale(self, a: float) -> "SignedMeasure":
        return scale(self, a)

    def shift(self, c: float) -> "SignedMeasure":
        return shift(self, c)

    def power(self, n: int) -> "SignedMeasure":
        return power(self, n)

    def nu0(self) -> float:
        return variation_nu0(self)


# -- constructors ----------------------------------------------------------


def zero() -> SignedMeasure:
    return SignedMeasure.make()


def dirac(x: float = 0.0, weight: float = 1.0) -> SignedMeasure:
    return SignedMeasure.make([x], [weight])


def normal(sd: float = 1.0, mean: float = 0.0, weight: float = 1.0) -> SignedMeasure:
    return SignedMeasure.make(g_means=[mean], g_sds=[sd], g_weights=[weight])


def discrete(locs, weights) -> SignedMeasure:
    return SignedMeasure.make(locs, weights)


# -- algebra ---------------------------------------------------------------


def _pairwise_atoms(l1, w1, l2, w2, cap):
    if l1.size * l2.size <= _CHUNK_PAIRS:
        return _merge_atoms(np.add.outer(l1, l2), np.multiply.outer(w1, w2))
    acc_l, acc_w = np.empty(0), np.empty(0)
    step = max(1, _CHUNK_PAIRS // l2.size)
    for i in range(0, l1.size, step):
        cl = np.add.outer(l1[i:i + step], l2).reshape(-1)
        cw = np.multiply.outer(w1[i:i + step], w2).reshape(-1)
        acc_l, acc_w = _merge_atoms(np.concatenate((acc_l, cl)), np.concatenate((acc_w, cw)))
        if acc_l.size > cap:
            raise ResourceCap(f"convolution exceeds the atom cap of {cap}")
    return acc_l, acc_w


def convolve(m1: SignedMeasure, m2: SignedMeasure, cap: int = DEFAULT_ATOM_CAP) -> SignedMeasure:
    """M1 * M2, exact in the mixture representation."""
    al, aw = _pairwise_atoms(m1.atom_locs, m1.atom_weights, m2.atom_locs, m2.atom_weights, cap)
    if al.size > cap:
        raise ResourceCap(f"convolution exceeds the atom cap of {cap}")
    parts_m, parts_s, parts_w = [], [], []
    # atom x gaussian, both orders
    for a, b in ((m1, m2), (m2, m1)):
        if a.n_atoms and b.n_gaussians:
            parts_m.append(np.add.outer(a.atom_locs, b.g_means).reshape(-1))
            parts_s.append(np.broadcast_to(b.g_sds, (a.n_atoms, b.n_gaussians)).reshape(-1))
            parts_w.append(np.multiply.outer(a.atom_weights, b.g_weights).reshape(-1))
    if m1.n_gaussians and m2.n_gaussians:
        parts_m.append(np.add.outer(m1.g_means, m2.g_means).reshape(-1))
        parts_s.append(np.sqrt(np.add.outer(m1.g_sds ** 2, m2.g_sds ** 2)).reshape(-1))
        parts_w.append(np.multiply.outer(m1.g_weights, m2.g_weights).reshape(-1))
    if parts_m:
        gm, gs, gw = _merge_gaussians(np.concatenate(parts_m), np.concatenate(parts_s), np.concatenate(parts_w))
    else:
        gm = gs = gw = np.empty(0)
    if gm.size > cap:
        raise ResourceCap(f"convolution exceeds the component cap of {cap}")
    return SignedMeasure(_freeze(al), _freeze(aw), _freeze(gm), _freeze(gs), _freeze(gw))


def power(m: SignedMeasure, n: int, cap: int = DEFAULT_ATOM_CAP) -> SignedMeasure:
    """M^{*n} by binary exponentiation; M^{*0} is the Dirac mass at zero."""
    if n < 0 or int(n) != n:
        raise BadParams("power needs a natural exponent")
    n = int(n)
    result = dirac(0.0)
    base = m
    while n:
        if n & 1:
            result = convolve(result, base, cap)
        n >>= 1
        if n:
            base = convolve(base, base, cap)
    return result


def scale(m: SignedMeasure, a: float) -> SignedMeasure:
    """Image of M under x -> a x (the measure M(./a)), a > 0."""
    if not a > 0:
        raise BadParams("scale factor must be positive")
    return SignedMeasure.make(a * m.atom_locs, m.atom_weights, a * m.g_means, a * m.g_sds, m.g_weights)


def shift(m: SignedMeasure, c: float) -> SignedMeasure:
    return SignedMeasure.make(m.atom_locs + c, m.atom_weights, m.g_means + c, m.g_sds, m.g_weights)


# -- moments ---------------------------------------------------------------


def raw_moment(m: SignedMeasure, k: int) -> float:
    terms = (m.atom_weights * m.atom_locs ** k).tolist()
    if m.n_gaussians:
        terms += (m.g_weights * nx.gauss_raw_moment(m.g_means, m.g_sds, k)).tolist()
    return math.fsum(terms)


def nu(m: SignedMeasure, r: float) -> float:
    """nu_r(M) = int |x|^r d|M|."""
    r = float(r)
    atom_part = math.fsum((np.abs(m.atom_weights) * np.abs(m.atom_locs) ** r).tolist()) if m.n_atoms else 0.0
    if r == 0.0:
        atom_part = math.fsum(np.abs(m.atom_weights).tolist())
    if not m.n_gaussians:
        return atom_part
    same_sign = np.all(m.g_weights > 0) or np.all(m.g_weights < 0)
    if same_sign and r in (0.0, 1.0, 2.0, 3.0):
        cont = float(np.dot(np.abs(m.g_weights), nx.gauss_abs_moment(m.g_means, m.g_sds, int(r))))
    elif r == 0.0:
        cont = sum(abs(m._gauss_mass(a, b)) for a, b, _ in m.continuous_pieces())
    else:
        g = m.zero_atoms()
        cont = g.integrate(lambda x: abs(x) ** r, kinks=(0.0,), absolute=True)
    return atom_part + cont


def _zero_atoms(self: SignedMeasure) -> SignedMeasure:
    return SignedMeasure(_freeze([]), _freeze([]), self.g_means, self.g_sds, self.g_weights)


SignedMeasure.zero_atoms = _zero_atoms


def moments(m: SignedMeasure, r: float = 3.0) -> MomentVector:
    mu = [raw_moment(m, k) for k in range(4)]
    var = mu[0] * mu[2] - mu[1] ** 2
    sigma = math.sqrt(var) if var > 0 else 0.0
    return MomentVector(mu[0], mu[1], mu[2], mu[3], float(r), nu(m, r), sigma)


def nu_mg(m: SignedMeasure, mm: int, g) -> float:
    """nu_{m,g}(M) = int |x|^m g(|x|) d|M| for g in the class G."""
    kinks = tuple(k for p in g.kinks() for k in (p, -p)) + (0.0,)
    f = lambda x: abs(x) ** mm * float(g(abs(x)))
    atom_part = 0.0
    if m.n_atoms:
        ax = np.abs(m.atom_locs)
        atom_part = math.fsum((np.abs(m.atom_weights) * ax ** mm * g(ax)).tolist())
    if not m.n_gaussians:
        return atom_part
    return atom_part + m.zero_atoms().integrate(f, kinks=kinks, absolute=True)


def standardize(p: SignedMeasure) -> SignedMeasure:
    """Law of (X - mu)/sigma for X ~ P."""
    mv = moments(p, 0.0)
    if abs(mv.mu0 - 1.0) > 1e-12:
        raise NotALaw(f"total mass {mv.mu0!r} != 1")
    if not mv.sigma > 0:
        raise DegenerateLaw("standard deviation is zero")
    # two passes: centre first so the variance is not a difference of large moments
    mu = mv.mu1 / mv.mu0
    c = shift(p, -mu)
    mu = mu + raw_moment(c, 1)
    c = shift(p, -mu)
    sig = math.sqrt(raw_moment(c, 2) - raw_moment(c, 1) ** 2)
    return SignedMeasure.make((p.atom_locs - mu) / sig, p.atom_weights, (p.g_means - mu) / sig, p.g_sds / sig, p.g_weights)


def cdf(m: SignedMeasure, x) -> np.ndarray:
    """F_M(x) = M(]-inf, x])."""
    x = np.asarray(x, dtype=float)
    cum = np.concatenate(([0.0], np.cumsum(m.atom_weights)))
    out = cum[np.searchsorted(m.atom_locs, x, side="right")]
    return out + m._gauss_cdf(x)


def variation_nu0(m: SignedMeasure) -> float:
    """Total variation nu_0(M) = |M|(R)."""
    return nu(m, 0.0)


# -- text format -------------------------------------------------------------


def dumps(m: SignedMeasure) -> str:
    buf = io.StringIO()
    buf.write(f"atoms {m.n_atoms} gaussians {m.n_gaussians}\n")
    for x, w in m.atoms:
        buf.write(f"A {x:.17g} {w:.17g}\n")
    for mean, sd, w in m.gaussians:
        buf.write(f"G {mean:.17g} {sd:.17g} {w:.17g}\n")
    return buf.getvalue()


def loads(text: str) -> SignedMeasure:
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 4 or lines[0][0] != "atoms" or lines[0][2] != "gaussians":
        raise BadParams("missing 'atoms <k> gaussians <m>' header")
    k, g = int(lines[0][1]), int(lines[0][3])
    atoms, gaussians = [], []
    for parts in lines[1:]:
        if parts[0] == "A" and len(parts) == 3:
            atoms.append((float(parts[1]), float(parts[2])))
        elif parts[0] == "G" and len(parts) == 4:
            gaussians.append((float(parts[1]), float(parts[2]), float(parts[3])))
        else:
            raise BadParams(f"bad measure line: {' '.join(parts)}")
    if len(atoms) != k or len(gaussians) != g:
        raise BadParams("component counts disagree with header")
    return SignedMeasure.from_lists(atoms, gaussians)
