import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from translab.averaging import ball_volume
from translab.geometry import make_test_interface
from translab.volume import ball_rule, chord_rule

GAMMAS = {
    "flat": make_test_interface("flat", 2),
    "sinusoid": make_test_interface("sinusoid", 2, amp=0.05, freq=8.0),
    "cusp": make_test_interface("cusp", 2, c=0.2, alpha0=0.5),
}


@pytest.mark.parametrize("name", list(GAMMAS))
@pytest.mark.parametrize("center,radius", [((0.0, 0.0), 0.4), ((0.2, -0.03), 0.1), ((0.1, 0.5), 0.3)])
def test_ball_rule_volume(name, center, radius):
    pts, w = ball_rule(GAMMAS[name], center, radius, 16)
    assert np.sum(w) == pytest.approx(np.pi * radius**2, rel=1e-13)
    assert np.all(np.linalg.norm(pts - center, axis=-1) <= radius * (1 + 1e-12))


def kink_oracle(gamma, c, r):
    """int over B_r(c) of |x_2 - psi(x_1)| by iterated quadrature with an exact inner integral."""
    def inner(s):
        half = np.sqrt(max(r**2 - (s - c[0]) ** 2, 0.0))
        lo, hi = c[1] - half, c[1] + half
        p = float(gamma.height(np.array([[s]]))[0])
        if p <= lo or p >= hi:
            return (hi - lo) * abs(p - 0.5 * (lo + hi))
        return 0.5 * ((p - lo) ** 2 + (hi - p) ** 2)

    # the outer integrand has kinks where the interface crosses the circle
    a, b = c[0] - r * (1 - 1e-15), c[0] + r * (1 - 1e-15)
    s = np.linspace(a, b, 4001)
    half = np.sqrt(np.maximum(r**2 - (s - c[0]) ** 2, 0.0))
    psi = gamma.height(s[:, None])
    kinks = []
    for sign in (1, -1):
        f = lambda t: float(gamma.height(np.array([[t]]))[0]) - c[1] - sign * np.sqrt(max(r**2 - (t - c[0]) ** 2, 0.0))
        vals = psi - c[1] - sign * half
        for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
            kinks.append(brentq(f, s[i], s[i + 1], xtol=1e-15))
    return quad(inner, c[0] - r, c[0] + r, points=kinks or None, limit=500, epsabs=1e-15, epsrel=1e-14)[0]


# the cusp profile is only C^{1,1/2} at x' = 0, so Gauss panels meeting there converge algebraically
@pytest.mark.parametrize("name,q", [("sinusoid", 16), ("cusp", 48)])
def test_ball_rule_integrates_kink_across_interface(name, q):
    gamma = GAMMAS[name]
    c, r = np.array([0.05, 0.01]), 0.3
    pts, w = ball_rule(gamma, c, r, q)
    approx = np.sum(w * np.abs(pts[:, 1] - gamma.height(pts[:, :1])))
    assert approx == pytest.approx(kink_oracle(gamma, c, r), abs=1e-12)


def test_ball_rule_3d_volume_and_moment():
    gamma = make_test_interface("sinusoid", 3, amp=0.05, freq=6.0)
    c, r = np.array([0.1, 0.0, 0.02]), 0.3
    pts, w = ball_rule(gamma, c, r, 16)
    assert np.sum(w) == pytest.approx(ball_volume(3, r), rel=1e-12)
    second = np.sum(w * np.sum((pts - c) ** 2, -1))
    assert second == pytest.approx(4 * np.pi * r**5 / 5, rel=1e-12)


@pytest.mark.parametrize("xn,r", [(0.05, 0.1), (0.0, 0.3), (-0.09, 0.1)])
def test_chord_rule_flat_length(xn, r):
    yp, w = chord_rule(GAMMAS["flat"], np.array([0.2, xn]), r, 16)
    assert np.sum(w) == pytest.approx(2 * np.sqrt(r**2 - xn**2), rel=1e-13)


def test_chord_rule_misses():
    yp, w = chord_rule(GAMMAS["flat"], np.array([0.0, 0.5]), 0.2, 16)
    assert yp.shape[0] == 0 and w.shape[0] == 0


def test_chord_rule_3d_flat_area():
    gamma = make_test_interface("flat", 3)
    yp, w = chord_rule(gamma, np.array([0.1, -0.1, 0.06]), 0.1, 16)
    assert np.sum(w) == pytest.approx(np.pi * (0.01 - 0.0036), rel=1e-10)
