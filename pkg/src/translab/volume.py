"""Quadrature over balls and over the part of the interface inside a ball.

Fields built from single layers are smooth on each side of the interface but
only Lipschitz across it, so the ball rule splits every vertical segment at
the graph and places outer breakpoints where the interface leaves the ball.
"""

import numpy as np

from .quadrature import gauss_legendre, panel_rule, ray_exit, sign_change_roots, trapezoid_circle


def _panel_breaks(a, b, cuts, max_len):
    pts = np.unique(np.concatenate([[a, b], [c for c in cuts if a < c < b]]))
    out = [pts[0]]
    for lo, hi in zip(pts[:-1], pts[1:]):
        m = max(1, int(np.ceil((hi - lo) / max_len - 1e-12)))
        out.extend(np.linspace(lo, hi, m + 1)[1:])
    return np.array(out)


def _crossings_2d(gamma, center, radius):
    x1, x2 = center

    def F(t):
        return (t - x1) ** 2 + (gamma.height(t[:, None]) - x2) ** 2 - radius**2

    samples = int(max(129, 32 * radius / gamma.feature_scale))
    return sign_change_roots(F, x1 - radius, x1 + radius, samples)


def _split_segments(lo, hi, cut, q):
    """GL nodes on [lo, cut] and [cut, hi] per row; ``cut`` is clipped into [lo, hi]."""
    cut = np.clip(cut, lo, hi)
    x, w = gauss_legendre(q)
    pieces = []
    for a, b in ((lo, cut), (cut, hi)):
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        pieces.append((mid[:, None] + half[:, None] * x, half[:, None] * w))
    nodes = np.concatenate([p[0] for p in pieces], axis=1)
    weights = np.concatenate([p[1] for p in pieces], axis=1)
    return nodes, weights


def ball_rule(gamma, center, radius, q=32):
    """Nodes (m, n) and weights (m,) integrating over B_radius(center).

    In the plane the horizontal variable is y1 = x1 + r sin(t), which absorbs
    the square-root behaviour of the half-heights at the rim.  In space the
    same substitution is used radially around x' with a periodic rule in angle.
    """
    center = np.asarray(center, dtype=float)
    if gamma.dim == 2:
        pts, w = _ball_rule_2d(gamma, center, float(radius), q)
    else:
        pts, w = _ball_rule_3d(gamma, center, float(radius), q)
    # segments the interface does not cut leave an empty piece behind
    keep = w != 0.0
    return pts[keep], w[keep]


def _ball_rule_2d(gamma, center, r, q):
    x1, x2 = center
    cuts = [np.arcsin(np.clip((t - x1) / r, -1.0, 1.0)) for t in _crossings_2d(gamma, center, r)]
    cuts += [np.arcsin((p - x1) / r) for p in gamma.singular_points if abs(p - x1) < r]
    max_len = min(np.pi / 2, 2.0 * gamma.feature_scale / r)
    breaks = _panel_breaks(-np.pi / 2, np.pi / 2, cuts, max_len)
    t, wt = panel_rule(breaks, q)
    y1 = x1 + r * np.sin(t)
    half = r * np.cos(t)
    wt = wt * r * np.cos(t)
    y2, w2 = _split_segments(x2 - half, x2 + half, gamma.height(y1[:, None]), q)
    pts = np.stack([np.broadcast_to(y1[:, None], y2.shape), y2], -1).reshape(-1, 2)
    return pts, (wt[:, None] * w2).ravel()


def _ball_rule_3d(gamma, center, r, q):
    xp, x3 = center[:2], center[2]
    phi, wphi = trapezoid_circle(2 * q)
    max_len = min(np.pi / 4, 2.0 * gamma.feature_scale / r)
    all_pts, all_w = [], []
    for ph, wp in zip(phi, wphi):
        e = np.array([np.cos(ph), np.sin(ph)])

        def F(tau, e=e):
            rho = r * np.sin(tau)
            y = xp + rho[:, None] * e
            return rho**2 + (gamma.height(y) - x3) ** 2 - r**2

        cuts = list(sign_change_roots(F, 0.0, np.pi / 2, 65)) if np.isfinite(x3) else []
        breaks = _panel_breaks(0.0, np.pi / 2, cuts, max_len)
        tau, wt = panel_rule(breaks, q)
        rho = r * np.sin(tau)
        half = r * np.cos(tau)
        wt = wt * r * np.cos(tau) * rho * wp
        yp = xp + rho[:, None] * e
        y3, w3 = _split_segments(x3 - half, x3 + half, gamma.height(yp), q)
        pts = np.concatenate(
            [np.broadcast_to(yp[:, None, :], y3.shape + (2,)), y3[..., None]], -1
        ).reshape(-1, 3)
        all_pts.append(pts)
        all_w.append((wt[:, None] * w3).ravel())
    return np.concatenate(all_pts), np.concatenate(all_w)


def chord_rule(gamma, center, radius, q=32):
    """Tangential nodes and weights covering {y' : |(y', psi(y')) - center| < radius}.

    The weights omit the area element.  Returns empty arrays when the
    interface misses the ball.
    """
    center = np.asarray(center, dtype=float)
    r = float(radius)
    if gamma.dim == 2:
        return _chord_rule_2d(gamma, center, r, q)
    return _chord_rule_3d(gamma, center, r, q)


def _chord_rule_2d(gamma, center, r, q):
    x1, x2 = center
    roots = _crossings_2d(gamma, center, r)
    pts = np.concatenate([[x1 - r], roots, [x1 + r]])
    max_len = 0.5 * gamma.feature_scale
    nodes, weights = [], []
    for a, b in zip(pts[:-1], pts[1:]):
        if b <= a:
            continue
        m = 0.5 * (a + b)
        if (m - x1) ** 2 + (float(gamma.height(np.array([[m]]))[0]) - x2) ** 2 >= r**2:
            continue
        breaks = _panel_breaks(a, b, gamma.singular_points, max_len)
        t, w = panel_rule(breaks, q)
        nodes.append(t)
        weights.append(w)
    if not nodes:
        return np.zeros((0, 1)), np.zeros(0)
    return np.concatenate(nodes)[:, None], np.concatenate(weights)


def _chord_rule_3d(gamma, center, r, q):
    c = center[:2]

    def F(y):
        return np.sum((y - c) ** 2, -1) + (gamma.height(y) - center[2]) ** 2 - r**2

    if F(c[None])[0] >= 0.0:
        # the chord set is star-shaped about c' for the near-flat graphs used here
        return np.zeros((0, 2)), np.zeros(0)
    phi, wphi = trapezoid_circle(2 * q)
    e = np.stack([np.cos(phi), np.sin(phi)], -1)
    rho_max = ray_exit(lambda rho: F(c + rho[:, None] * e), np.zeros(phi.size), np.full(phi.size, r))
    s, ws = gauss_legendre(q)
    s = 0.5 * (s + 1.0)
    ws = 0.5 * ws
    rho = rho_max[:, None] * s[None, :]
    pts = c + rho[..., None] * e[:, None, :]
    w = wphi[:, None] * ws[None, :] * s[None, :] * rho_max[:, None] ** 2
    return pts.reshape(-1, 2), w.ravel()
