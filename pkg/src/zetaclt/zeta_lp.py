"""Linear-programming lower bounds for zeta_{m,g}(M).

The decision variable is the m-th derivative f^(m) sampled on a uniform grid,
s_i = f^(m)(x_i). Between grid points f^(m) is the linear interpolant and
outside the window it is held constant. For concave g the interpolant keeps
the modulus constraint everywhere once it holds on grid pairs, so each LP
optimum is an explicit member of the test class and its objective is a
certified lower bound.

int f dM is linear in s. With T_k(a) = int (x - a)_+^k dM(x) and
U = T_{m+1}/(m+1)!, the coefficient of an interior hat is the second
difference of U divided by the spacing; the two constant end pieces get
one-sided differences (plus mu_m/m! on the left).
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from . import _numerics as nx
from .errors import BadParams, GapNotReached, InfeasibleGrid, SolverFailure
from .gfun import GFun, MinIdPower
from .measure import SignedMeasure, raw_moment
from .metrics import require_moments_zero, zeta2delta_upper, zeta_lower_testfn_detail
from .report import EstimateInterval

MAX_POINTS = 4096
DEFAULT_POINTS = 257
FEAS_TOL = 1e-10
_MAX_ROUNDS = 200
_PER_OFFSET = 4


@dataclass(frozen=True)
class GridSpec:
    left: float
    right: float
    points: int = DEFAULT_POINTS

    def __post_init__(self):
        if not self.left < self.right:
            raise BadParams("grid needs left < right")
        if not 3 <= self.points <= MAX_POINTS:
            raise BadParams(f"grid points must lie in [3, {MAX_POINTS}]")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.left, self.right, self.points)

    @property
    def h(self) -> float:
        return (self.right - self.left) / (self.points - 1)

    def refined(self) -> "GridSpec":
        """Same window, spacing halved: every old node stays a node."""
        return GridSpec(self.left, self.right, 2 * self.points - 1)

    @classmethod
    def for_measure(cls, m: SignedMeasure, points: int = DEFAULT_POINTS) -> "GridSpec":
        """Symmetric window over the 12-sd hull."""
        lo, hi = m.hull()
        w = max(abs(lo), abs(hi), 1.0)
        return cls(-w, w, points)

    def covers(self, m: SignedMeasure) -> bool:
        lo, hi = m.hull()
        slack = 1e-12 * (1.0 + max(abs(lo), abs(hi)))
        return self.left <= lo + slack and self.right >= hi - slack


@dataclass(frozen=True)
class DualCertificate:
    """An explicit test function, given by its m-th derivative on a grid, and its value."""

    grid: GridSpec
    second_derivative_values: np.ndarray
    objective: float
    order: int = 2
    g: GFun | None = None
    coefficients: np.ndarray = field(default=None, repr=False)
    method: str = "lp"

    @property
    def values(self) -> np.ndarray:
        return self.second_derivative_values

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("x,s\n")
        for xi, si in zip(self.grid.x, self.values):
            buf.write(f"{xi:.17g},{si:.17g}\n")
        return buf.getvalue()


# -- coefficients --------------------------------------------------------------------


def _tail_moments(m: SignedMeasure, a: np.ndarray, k: int, upper: bool) -> np.ndarray:
    """upper: int (x - a)_+^k dM; else int (a - x)_+^k dM, vectorised over a."""
    out = np.zeros(a.shape)
    if m.n_atoms:
        step = max(1, 2_000_000 // m.n_atoms)
        for i in range(0, a.size, step):
            d = m.atom_locs[None, :] - a[i:i + step, None]
            if not upper:
                d = -d
            pk = (d > 0.0).astype(float) if k == 0 else np.maximum(d, 0.0) ** k
            out[i:i + step] += pk @ m.atom_weights
    if m.n_gaussians:
        step = max(1, 2_000_000 // m.n_gaussians)
        sk = m.g_weights * m.g_sds ** k
        for i in range(0, a.size, step):
            z = (a[i:i + step, None] - m.g_means[None, :]) / m.g_sds[None, :]
            if not upper:
                z = -z
            out[i:i + step] += nx.trunc_power_moment(z, k) @ sk
    return out


def truncated_moment(m: SignedMeasure, a, k: int) -> np.ndarray:
    """T_k(a) = int (x - a)_+^k dM(x).

    For a < 0 the identity (x - a)_+^k = (x - a)^k - (-1)^k (a - x)_+^k keeps
    the evaluation on the small side of the measure.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    out = np.empty(a.shape)
    pos = a >= 0
    if np.any(pos):
        out[pos] = _tail_moments(m, a[pos], k, upper=True)
    neg = ~pos
    if np.any(neg):
        an = a[neg]
        mu = [raw_moment(m, j) for j in range(k + 1)]
        poly = sum(math.comb(k, j) * mu[j] * (-an) ** (k - j) for j in range(k + 1))
        out[neg] = poly - (-1) ** k * _tail_moments(m, an, k, upper=False)
    return out


def lp_coefficients(m: SignedMeasure, grid: GridSpec, order: int = 2) -> np.ndarray:
    """c with int f dM = c . s for f^(order) the interpolant of s (constant beyond the ends)."""
    x, h = grid.x, grid.h
    u = truncated_moment(m, x, order + 1) / math.factorial(order + 1)
    c = np.empty(x.size)
    c[1:-1] = (u[:-2] - 2.0 * u[1:-1] + u[2:]) / h
    c[0] = raw_moment(m, order) / math.factorial(order) + (u[1] - u[0]) / h
    c[-1] = (u[-2] - u[-1]) / h
    return c


# -- reconstruction and audit ----------------------------------------------------------


def reconstruct(grid: GridSpec, s: np.ndarray, order: int = 2):
    """Vectorised f with f^(order) the interpolant of s, normalised by f = ... = f^(order-1) = 0 at the left end."""
    x, h = grid.x, grid.h
    s = np.asarray(s, dtype=float)
    slope = np.diff(s) / h
    # derivatives of order j < order at each node, by exact integration of the linear pieces
    derivs = [np.zeros(x.size) for _ in range(order)]  # derivs[j] = f^(j)
    for i in range(x.size - 1):
        for j in range(order):
            # Taylor expansion of f^(j) over one cell of the piecewise polynomial
            val = sum(derivs[j + q][i] * h ** q / math.factorial(q) for q in range(order - j))
            val += s[i] * h ** (order - j) / math.factorial(order - j)
            val += slope[i] * h ** (order - j + 1) / math.factorial(order - j + 1)
            derivs[j][i + 1] = val

    def f(t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(x, t, side="right") - 1, 0, x.size - 1)
        d = t - x[idx]
        sl = np.where(idx < x.size - 1, slope[np.minimum(idx, x.size - 2)], 0.0)
        sl = np.where(t < x[0], 0.0, sl)
        base = np.where(t < x[0], s[0], s[idx])
        out = sum(derivs[q][idx] * d ** q / math.factorial(q) for q in range(order))
        out = out + base * d ** order / math.factorial(order) + sl * d ** (order + 1) / math.factorial(order + 1)
        return out

    return f


def max_pair_violation(grid: GridSpec, s: np.ndarray, g: GFun) -> float:
    """max over all pairs of |s_i - s_j| - g(|x_i - x_j|)."""
    h = grid.h
    worst = -np.inf
    for k in range(1, s.size):
        d = np.max(np.abs(s[k:] - s[:-k])) - float(g(k * h))
        worst = max(worst, d)
    return float(worst) if s.size > 1 else 0.0


def mcshane(grid: GridSpec, s: np.ndarray, g: GFun) -> np.ndarray:
    """min_j (s_j + g(|x_i - x_j|)): the largest g-continuous minorant's values at the nodes."""
    n = s.size
    gk = np.asarray(g(np.arange(n) * grid.h), dtype=float)
    out = s.copy()
    for k in range(1, n):
        out[:-k] = np.minimum(out[:-k], s[k:] + gk[k])
        out[k:] = np.minimum(out[k:], s[:-k] + gk[k])
    return out


def audit(cert: DualCertificate, m: SignedMeasure, tol: float = 1e-9) -> dict:
    """Independent check: pair constraints and objective re-integrated from the reconstructed f."""
    s = cert.values
    out = {}
    if cert.g is not None:
        viol = float(max_pair_violation(cert.grid, s, cert.g))
        out["max_violation"] = viol
        out["constraints_ok"] = viol <= FEAS_TOL
    else:
        out["max_violation"] = float(np.max(np.abs(s)) - 1.0)
        out["constraints_ok"] = out["max_violation"] <= FEAS_TOL
    f = reconstruct(cert.grid, s, cert.order)
    val = m.integrate(lambda t: float(f(np.array([t]))[0]))
    out["recomputed"] = float(val)
    out["objective_ok"] = bool(abs(val - cert.objective) <= tol * max(1.0, abs(cert.objective)))
    out["ok"] = bool(out["constraints_ok"] and out["objective_ok"])
    return out


# -- solvers ---------------------------------------------------------------------------


def _initial_offsets(n: int) -> list:
    near = list(range(1, min(n, 9)))
    far = [1 << p for p in range(3, 20) if (1 << p) < n]
    return sorted(set(near + far))


def _rows_for(pairs_i: np.ndarray, pairs_j: np.ndarray, n: int):
    r = pairs_i.size
    rows = np.repeat(np.arange(2 * r), 2)
    cols = np.empty(4 * r, dtype=int)
    vals = np.empty(4 * r)
    cols[0::4], cols[1::4], cols[2::4], cols[3::4] = pairs_i, pairs_j, pairs_i, pairs_j
    vals[0::4], vals[1::4], vals[2::4], vals[3::4] = 1.0, -1.0, -1.0, 1.0
    return sparse.csr_matrix((vals, (rows, cols)), shape=(2 * r, n))


def _solve(c, pi, pj, bound, pin, n):
    A = _rows_for(pi, pj, n)
    b = np.repeat(bound, 2)
    bounds = [(None, None)] * n
    bounds[pin] = (0.0, 0.0)
    res = linprog(-c, A_ub=A, b_ub=b, bounds=bounds, method="highs",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise SolverFailure(f"LP solver: {res.message}")
    return res.x


def lp_lower(m: SignedMeasure, g: GFun, grid: GridSpec | None = None, check_moments: bool = True) -> DualCertificate:
    """Best interpolated test function on the grid for zeta_{2,g}(M), by constraint generation."""
    if check_moments:
        require_moments_zero(m, 2)
    grid = grid or GridSpec.for_measure(m)
    if not grid.covers(m):
        raise InfeasibleGrid(f"grid [{grid.left}, {grid.right}] misses the hull {m.hull()}")
    n, h = grid.points, grid.h
    c = lp_coefficients(m, grid, 2)
    if m.is_zero or not np.any(c):
        return DualCertificate(grid, np.zeros(n), 0.0, 2, g, c)
    gk = np.asarray(g(np.arange(n) * h), dtype=float)
    pin = int(np.argmin(np.abs(grid.x)))
    offs = _initial_offsets(n)
    pi = np.concatenate([np.arange(n - k) for k in offs])
    pj = np.concatenate([np.arange(k, n) for k in offs])
    for _ in range(_MAX_ROUNDS):
        s = _solve(c, pi, pj, gk[pj - pi], pin, n)
        new_i, new_j = [], []
        for k in range(1, n):
            excess = np.abs(s[k:] - s[:-k]) - gk[k]
            idx = np.nonzero(excess > FEAS_TOL)[0]
            if idx.size > _PER_OFFSET:
                idx = idx[np.argpartition(excess[idx], -_PER_OFFSET)[-_PER_OFFSET:]]
            if idx.size:
                new_i.append(idx)
                new_j.append(idx + k)
        if not new_i:
            break
        pi = np.concatenate([pi] + new_i)
        pj = np.concatenate([pj] + new_j)
    else:
        raise SolverFailure("constraint generation did not converge")
    s_hat = mcshane(grid, s, g)
    s_hat = s_hat - s_hat[pin]
    return DualCertificate(grid, s_hat, float(np.dot(c, s_hat)), 2, g, c)


def lift(cert: DualCertificate, grid: GridSpec, m: SignedMeasure) -> DualCertificate:
    """Re-express a certificate on a finer nested grid (same function, same class)."""
    s = np.interp(grid.x, cert.grid.x, cert.values)
    c = lp_coefficients(m, grid, cert.order)
    return DualCertificate(grid, s, float(np.dot(c, s)), cert.order, cert.g, c, method="lifted")


def lp_refine(m: SignedMeasure, g: GFun, grid: GridSpec | None = None, max_points: int = 2049) -> list:
    """Certificates along a nested grid sequence; each entry is the best one found so far."""
    grid = grid or GridSpec.for_measure(m)
    out = []
    while True:
        cert = lp_lower(m, g, grid)
        if out:
            prev = out[-1]
            if prev.objective > cert.objective:
                cert = prev
        out.append(cert)
        if 2 * grid.points - 1 > min(max_points, MAX_POINTS):
            return out
        grid = grid.refined()


def lp_sandwich(m: SignedMeasure, delta: float, target_gap: float = 0.05, grid: GridSpec | None = None,
                max_points: int = 1025) -> EstimateInterval:
    """Refine the grid until (upper - lower)/upper <= target_gap or the point cap is hit."""
    g = MinIdPower(delta)
    upper = zeta2delta_upper(m, delta)
    if m.is_zero or upper == 0.0:
        return EstimateInterval(0.0, 0.0, "exact", "exact")
    tf, tf_label = zeta_lower_testfn_detail(m, delta)
    grid = grid or GridSpec.for_measure(m)
    best, method = tf, f"testfn:{tf_label}"
    prev = None
    while True:
        cert = lp_lower(m, g, grid)
        if prev is not None and prev.objective > cert.objective:
            cert = prev
        prev = cert
        if cert.objective > best:
            best, method = cert.objective, f"lp:{grid.points}"
        if (upper - best) / upper <= target_gap:
            break
        if 2 * grid.points - 1 > min(max_points, MAX_POINTS):
            break
        grid = grid.refined()
    flags = []
    if (upper - best) / upper > target_gap:
        flags.append("gap_not_reached")
        warnings.warn(f"relative gap {(upper - best) / upper:.3g} above target {target_gap}", GapNotReached)
    if g.bounded:
        flags.append("heuristic_lower")
    return EstimateInterval(min(best, upper), upper, method, "moment", tuple(flags))


def zeta1_lp(m: SignedMeasure, grid: GridSpec | None = None) -> DualCertificate:
    """First-order analogue: f' interpolated from values in [-1, 1]. The box LP is solved in closed form."""
    grid = grid or GridSpec.for_measure(m)
    if not grid.covers(m):
        raise InfeasibleGrid("grid misses the hull")
    c = lp_coefficients(m, grid, 1)
    s = np.sign(c)
    return DualCertificate(grid, s, float(np.dot(c, s)), 1, None, c, method="box")


def zeta2_box_lp(m: SignedMeasure, grid: GridSpec | None = None) -> DualCertificate:
    """zeta_2 estimator: f'' interpolated from values in [-1, 1], closed-form optimum."""
    require_moments_zero(m, 2)
    grid = grid or GridSpec.for_measure(m)
    if not grid.covers(m):
        raise InfeasibleGrid("grid misses the hull")
    c = lp_coefficients(m, grid, 2)
    s = np.sign(c)
    return DualCertificate(grid, s, float(np.dot(c, s)), 2, None, c, method="box")
