"""Ball averages u_eps of a potential and the matching interface averages g_eps."""

from dataclasses import dataclass
from math import gamma as gamma_fn

import numpy as np

from .errors import DomainError
from .geometry import Integral, make_test_interface
from .potential import as_density
from .volume import ball_rule, chord_rule


def ball_volume(n, r=1.0):
    return np.pi ** (n / 2) / gamma_fn(n / 2 + 1) * r**n


def _check_inside(x, eps, margin=0.0):
    if np.linalg.norm(x) + eps + margin >= 1.0:
        raise DomainError(f"B_{eps}(x) with margin {margin} leaves the unit ball")


def _split_interface(u):
    # fields without an interface are smooth; a far-away plane leaves every segment unsplit
    return u.interface if u.interface is not None else make_test_interface("flat", u.dim, level=-10.0)


def ball_average(u, x, eps, order=16):
    """(1/|B_eps|) int_{B_eps(x)} u, with the change under halving the order as error."""
    x = np.asarray(x, dtype=float)
    _check_inside(x, eps)
    gamma = _split_interface(u)
    vol = ball_volume(x.size, eps)
    vals = []
    for q in (order, max(2, order // 2)):
        pts, w = ball_rule(gamma, x, eps, q)
        vals.append(float(np.sum(w * u(pts))) / vol)
    return Integral(vals[0], abs(vals[0] - vals[1]))


def interface_average(g, gamma, x, eps, order=16):
    """(1/|B_eps|) int_{Gamma cap B_eps(x)} g dH; zero when the ball misses the interface."""
    x = np.asarray(x, dtype=float)
    _check_inside(x, eps)
    g = as_density(g)
    yp, w = chord_rule(gamma, x, eps, order)
    if yp.shape[0] == 0:
        return 0.0
    y = gamma.point(yp)
    return float(np.sum(w * g(y) * gamma.area_element(yp))) / ball_volume(x.size, eps)


class AveragedField:
    """x -> u_eps(x) together with its companion x -> g_eps(x)."""

    def __init__(self, u, eps, gamma=None, density=None, order=16):
        self.u = u
        self.eps = float(eps)
        self.gamma = gamma if gamma is not None else u.interface
        self.density = as_density(density if density is not None else u.density)
        self.order = order
        self.dim = u.dim

    def __call__(self, x):
        return ball_average(self.u, x, self.eps, self.order).value

    def value(self, x):
        return ball_average(self.u, x, self.eps, self.order)

    def g_eps(self, x):
        if self.gamma is None:
            return 0.0
        return interface_average(self.density, self.gamma, x, self.eps, self.order)


# second-difference weights at offsets 0, +-1, +-2 (in units of h)
STENCILS = {
    "compact": {0: -2.0, 1: 1.0},
    "wide": {0: -30.0 / 12.0, 1: 16.0 / 12.0, 2: -1.0 / 12.0},
}


@dataclass(frozen=True)
class LaplacianMatch:
    residual: float
    laplacian: float
    g_eps: float
    budget: float
    h: float


def discrete_laplacian(f, x, h, stencil="wide"):
    """Sum over axes of the 1-D second difference of f at x."""
    weights = STENCILS[stencil]
    x = np.asarray(x, dtype=float)
    n = x.size
    center = f(x)
    total = n * weights[0] * center
    for axis in range(n):
        e = np.zeros(n)
        e[axis] = h
        for k, w in weights.items():
            if k == 0:
                continue
            total += w * (f(x + k * e) + f(x - k * e))
    return total / h**2


def laplacian_match(field: AveragedField, x, h=None, stencil="wide"):
    """|discrete Laplacian of u_eps at x - g_eps(x)|.

    The default stencil is fourth order: across the band around the interface
    g_eps is only as smooth as the chord length, and the second-order
    stencil's h^2 g_eps''/12 term alone is several times 1e-3 at eps = 0.1,
    h = 0.01.  ``budget`` is the change of the discrete Laplacian when h is
    doubled, an estimate of the truncation error.
    """
    h = field.eps / 10.0 if h is None else float(h)
    x = np.asarray(x, dtype=float)
    reach = max(STENCILS[stencil])
    _check_inside(x, field.eps, 2 * reach * h)
    lap = discrete_laplacian(field, x, h, stencil)
    lap2 = discrete_laplacian(field, x, 2 * h, stencil)
    ge = field.g_eps(x)
    return LaplacianMatch(abs(lap - ge), lap, ge, abs(lap2 - lap), h)
