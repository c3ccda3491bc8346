"""Low-level quadrature rules: Gauss-Legendre panels, geometric grading, interval roots."""

from functools import lru_cache

import numpy as np
from scipy.optimize import brentq


@lru_cache(maxsize=64)
def gauss_legendre(q):
    """Nodes and weights of the q-point Gauss-Legendre rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(int(q))
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(breaks, q):
    """Composite Gauss-Legendre rule on consecutive breakpoints.

    ``breaks`` may be 1-D (one partition) or 2-D with one partition per row;
    zero-length panels are allowed and receive zero weight.
    """
    x, w = gauss_legendre(q)
    breaks = np.asarray(breaks, dtype=float)
    lo = breaks[..., :-1]
    hi = breaks[..., 1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[..., None] + half[..., None] * x
    weights = half[..., None] * w
    shape = breaks.shape[:-1] + (-1,)
    return nodes.reshape(shape), weights.reshape(shape)


def uniform_breaks(a, b, max_len):
    """Breakpoints splitting [a, b] into equal panels no longer than ``max_len``."""
    m = max(1, int(np.ceil((b - a) / max_len - 1e-12)))
    return np.linspace(a, b, m + 1)


def grading_levels(base, dists, max_levels=48):
    """Number of geometric refinement levels needed for targets at distance ``dists``."""
    base = np.asarray(base, dtype=float)
    dists = np.asarray(dists, dtype=float)
    L = float(np.max(np.diff(base)))
    # panels below ~1e-13 relative would put nodes on top of the center in floating point
    tiny = max(L * 2.0 ** (-max_levels), 1e-13 * max(1.0, float(np.max(np.abs(base)))))
    levels = np.ceil(np.log2(L / np.maximum(dists, tiny))) + 1
    return np.clip(levels, 0, max_levels).astype(int)


def graded_breaks(base, centers, dists, max_levels=48):
    """Add geometric grading toward ``centers`` to the partition ``base``.

    Row i of the result is the sorted union of ``base`` with the points
    ``centers[i] +/- L * 2**-j`` for ``j = 1..J_i``, where ``L`` is the longest
    base panel and ``J_i`` is the first level whose panel is no longer than
    ``dists[i]``.  Unused levels collapse onto the center, so every row has the
    same length and the rule stays vectorised.
    """
    base = np.asarray(base, dtype=float)
    centers = np.clip(np.asarray(centers, dtype=float), base[0], base[-1])
    L = float(np.max(np.diff(base)))
    levels = grading_levels(base, dists, max_levels)
    jmax = int(levels.max()) if levels.size else 0
    j = np.arange(1, jmax + 1)
    offs = L * 2.0 ** (-j)
    active = j[None, :] <= levels[:, None]
    offs = np.where(active, offs[None, :], 0.0)
    pts = np.concatenate(
        [
            np.broadcast_to(base, (centers.size, base.size)),
            centers[:, None] - offs,
            centers[:, None] + offs,
            centers[:, None],
        ],
        axis=1,
    )
    pts = np.clip(pts, base[0], base[-1])
    return np.sort(pts, axis=1)


def sign_change_roots(func, a, b, samples=257, xtol=1e-15):
    """All roots of a scalar function on [a, b] located by sampling and Brent refinement."""
    t = np.linspace(a, b, samples)
    f = np.asarray(func(t), dtype=float)
    roots = []
    for i in range(samples - 1):
        if f[i] == 0.0:
            roots.append(t[i])
        elif f[i] * f[i + 1] < 0.0:
            roots.append(brentq(lambda s: float(func(np.array([s]))[0]), t[i], t[i + 1], xtol=xtol, rtol=1e-15))
    if f[-1] == 0.0:
        roots.append(t[-1])
    return np.array(roots)


def negative_intervals(func, a, b, samples=257):
    """Maximal subintervals of [a, b] on which ``func < 0``.

    Sub-sample features narrower than the sampling step are not resolved.
    """
    roots = sign_change_roots(func, a, b, samples)
    pts = np.concatenate([[a], roots, [b]])
    pts = np.unique(pts)
    out = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi - lo <= 0:
            continue
        if float(func(np.array([0.5 * (lo + hi)]))[0]) < 0.0:
            if out and abs(out[-1][1] - lo) < 1e-15:
                out[-1] = (out[-1][0], hi)
            else:
                out.append((lo, hi))
    return out


def ray_exit(func, lo, hi, iters=60):
    """Vectorised bisection for the first sign change of ``func`` along rays.

    ``func(rho)`` maps an array of radii (one per ray) to values that are
    negative at ``lo`` and positive at ``hi``; returns the crossing radius per ray.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        neg = func(mid) < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    return 0.5 * (lo + hi)


def trapezoid_circle(m):
    """Equispaced angles and weights for periodic integration over [0, 2*pi)."""
    phi = 2.0 * np.pi * np.arange(m) / m
    return phi, np.full(m, 2.0 * np.pi / m)
