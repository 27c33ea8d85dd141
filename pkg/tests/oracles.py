"""Independent oracles the tests check library results against.

Everything here is deliberately brute force: lattice scans, finite
differences, dense grids, Monte Carlo.  None of it shares code paths with
the library.
"""

from __future__ import annotations

import math

import numpy as np


def primitive_vectors(radius: float) -> np.ndarray:
    """All primitive integer vectors with norm <= radius.

    These are exactly the saddle connection holonomies of the unit square
    torus with its single marked point.
    """
    m = int(math.floor(radius))
    xs, ys = np.mgrid[-m : m + 1, -m : m + 1]
    xs, ys = xs.ravel(), ys.ravel()
    keep = (xs != 0) | (ys != 0)
    xs, ys = xs[keep], ys[keep]
    g = np.gcd(np.abs(xs), np.abs(ys))
    keep = (g == 1) & (np.hypot(xs, ys) <= radius)
    return np.column_stack((xs[keep], ys[keep])).astype(float)


def central_difference(fn, x: float, step: float = 1e-5) -> float:
    return (fn(x + step) - fn(x - step)) / (2.0 * step)


def flowed_norm(v, t: float) -> float:
    return math.hypot(math.exp(t) * v[0], math.exp(-t) * v[1])


def sign_scan_zero_count(fn, lo: float, hi: float, points: int = 10_000):
    """Number of sign changes of fn on a dense grid, plus the grid values."""
    xs = np.linspace(lo, hi, points)
    vals = np.array([fn(x) for x in xs])
    signs = np.sign(vals)
    nonzero = signs[signs != 0]
    changes = int(np.count_nonzero(nonzero[1:] != nonzero[:-1]))
    return changes, xs, vals


def grid_star_discrepancy(values, grid_points: int = 100_000) -> float:
    """Sup-scan approximation of D*_N, accurate to one grid spacing."""
    arr = np.sort(np.asarray(values, dtype=float))
    n = arr.size
    xs = np.linspace(0.0, 1.0, grid_points)
    emp = np.searchsorted(arr, xs, side="right") / n
    return float(np.abs(emp - xs).max())


def sector_count_oracle(radius: float, lo: float, hi: float) -> int:
    """Primitive vectors with angle in [lo, hi) and norm <= radius."""
    vecs = primitive_vectors(radius)
    ang = np.arctan2(vecs[:, 1], vecs[:, 0])
    ang = np.where(ang < 0, ang + 2.0 * math.pi, ang)
    rel = (ang - lo) % (2.0 * math.pi)
    return int(np.count_nonzero(rel < (hi - lo) % (2.0 * math.pi)))


def kernel_monte_carlo(v, w, p, s_window, n_draws, seed=0):
    """Monte Carlo estimate of the pair kernel with its standard error."""
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * math.pi, n_draws)
    s = rng.uniform(0.0, s_window, n_draws)

    def rate(u1, u2):
        c, sn = np.cos(theta), np.sin(theta)
        r1 = u1 * c - u2 * sn
        r2 = u1 * sn + u2 * c
        nn = np.hypot(r1, r2)
        return (r1**2 - r2**2) / nn

    diff = rate(v[0], v[1]) - rate(w[0], w[1])
    draws = np.exp(2j * math.pi * p * s * diff)
    mean = complex(draws.mean())
    se = float(np.hypot(draws.real.std(), draws.imag.std()) / math.sqrt(n_draws))
    return mean, se


def match_tolerant(a: np.ndarray, b: np.ndarray, tol: float = 1e-7) -> bool:
    """Multiset equality of planar point sets up to tol per coordinate."""
    if len(a) != len(b):
        return False
    sa = sorted(map(tuple, np.round(np.asarray(a, float) / tol) * tol))
    sb = sorted(map(tuple, np.round(np.asarray(b, float) / tol) * tol))
    return np.allclose(np.array(sa), np.array(sb), atol=2 * tol)
