"""Small numerical kernels shared across modules.

Gaussian tail functions, truncated Gaussian power moments, a golden-section
minimiser and a sign-change root bracketer.
"""

import math

import numpy as np
from scipy import special
from scipy.optimize import brentq

SQRT2PI = math.sqrt(2.0 * math.pi)
INV_SQRT2PI = 1.0 / SQRT2PI
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def npdf(z):
    return np.exp(-0.5 * np.square(z)) * INV_SQRT2PI


def ncdf(z):
    return special.ndtr(z)


def nsf(z):
    return special.ndtr(-np.asarray(z, dtype=float))


def trunc_power_moment(z, k):
    """E[(Z - z)_+^k] for standard normal Z and k in {0, 1, 2, 3}."""
    z = np.asarray(z, dtype=float)
    q = nsf(z)
    p = npdf(z)
    if k == 0:
        return q
    if k == 1:
        return p - z * q
    if k == 2:
        return (1.0 + z * z) * q - z * p
    if k == 3:
        return (z * z + 2.0) * p - (z ** 3 + 3.0 * z) * q
    raise ValueError("k must be in 0..3")


def gauss_abs_moment(mean, sd, r):
    """E|X|^r for X ~ N(mean, sd^2), closed form for integer r <= 3."""
    mean = np.asarray(mean, dtype=float)
    sd = np.asarray(sd, dtype=float)
    t = mean / sd
    tail = 1.0 - 2.0 * nsf(t)  # P(X > 0) - P(X < 0)
    dens = npdf(t)
    if r == 0:
        return np.ones_like(mean)
    if r == 1:
        return sd * 2.0 * dens + mean * tail
    if r == 2:
        return mean ** 2 + sd ** 2
    if r == 3:
        return (mean ** 3 + 3.0 * mean * sd ** 2) * tail + 2.0 * sd * dens * (mean ** 2 + 2.0 * sd ** 2)
    raise ValueError("closed form only for r in 0..3")


def gauss_raw_moment(mean, sd, k):
    mean = np.asarray(mean, dtype=float)
    sd = np.asarray(sd, dtype=float)
    if k == 0:
        return np.ones_like(mean)
    if k == 1:
        return mean
    if k == 2:
        return mean ** 2 + sd ** 2
    if k == 3:
        return mean ** 3 + 3.0 * mean * sd ** 2
    if k == 4:
        return mean ** 4 + 6.0 * mean ** 2 * sd ** 2 + 3.0 * sd ** 4
    raise ValueError("k must be in 0..4")


def golden_section(f, lo, hi, rtol=1e-10, maxiter=500):
    """Minimise a unimodal f on [lo, hi]. Returns (argmin, f(argmin))."""
    a, b = float(lo), float(hi)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if abs(b - a) <= rtol * (abs(a) + abs(b)) + 1e-300:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    best = min((fx, x), (fc, c), (fd, d))
    return best[1], best[0]


def sign_change_roots(f, xs, xtol=1e-12):
    """Roots of a continuous f bracketed by sign changes on the sorted grid xs.

    f must accept arrays. Exact zeros on the grid are returned as is.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.size < 2:
        return np.empty(0)
    vals = np.asarray(f(xs), dtype=float)
    roots = list(xs[vals == 0.0])
    s = np.sign(vals)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    scalar = lambda x: float(f(np.array([x]))[0])
    for i in idx:
        roots.append(brentq(scalar, xs[i], xs[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps))
    return np.unique(np.asarray(roots, dtype=float))
