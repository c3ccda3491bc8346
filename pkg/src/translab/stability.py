"""Curved interface versus flat companion: gaps, barrier fields and the eta imbalance."""

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import PreconditionError
from .geometry import StabilityParams, admissible_sinusoid, flatness_horizontality, make_test_interface
from .potential import DensityField, as_density, layer_field, poisson_extend, single_layer_solve


def oscillating_density(delta, freq=np.pi):
    """1 + delta/2 + (delta/2) cos(freq x_1), which stays within delta of 1."""
    return DensityField.cosine(1.0 + 0.5 * delta, 0.5 * delta, freq)


def check_hypotheses(gamma, g, params: StabilityParams, resolution=256):
    """Flatness, horizontality and |g - 1| <= delta, measured from the data.

    Returns (flatness, horizontality); raises PreconditionError naming every
    violated bound.
    """
    flat, horiz = flatness_horizontality(gamma, resolution)
    g = as_density(g)
    te = params.theta * params.eps
    bad = []
    if te > 0 and flat >= te:
        bad.append(f"sup|psi| = {flat:.6g} is not below theta*eps = {te:.6g}")
    if te == 0 and flat > 0:
        bad.append(f"sup|psi| = {flat:.6g} but theta*eps = 0")
    if horiz < 1.0 - params.eps - 1e-15:
        bad.append(f"min nu_n = {horiz:.6g} is below 1 - eps = {1.0 - params.eps:.6g}")
    xp = np.linspace(-1.0, 1.0, 2001)[:, None] if gamma.dim == 2 else _disk_samples(resolution)
    dev = float(np.max(np.abs(g(gamma.point(xp)) - 1.0)))
    if dev > params.delta + 1e-15:
        bad.append(f"sup|g - 1| = {dev:.6g} exceeds delta = {params.delta:.6g}")
    if bad:
        raise PreconditionError("; ".join(bad))
    return flat, horiz


def _disk_samples(resolution):
    t = np.linspace(-1.0, 1.0, resolution)
    X, Y = np.meshgrid(t, t, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], -1)
    return pts[np.sum(pts**2, -1) <= 1.0]


def solve_curved(gamma, g, params: StabilityParams = None, order=64):
    """The zero-trace layer solution on the curved interface, after validating the hypotheses."""
    if params is not None:
        check_hypotheses(gamma, g, params)
    return single_layer_solve(gamma, g, order)


def flat_companion(u, level, density=1.0, order=64):
    """Layer of the given density on {x_n = level} in B_1 plus the Poisson extension of u's trace."""
    if abs(level) >= 0.25:
        raise PreconditionError(f"|level| = {abs(level)} must be below 1/4")
    plane = make_test_interface("flat", u.dim, level=level)
    v = layer_field(plane, density, order=order, label="v")
    return v + poisson_extend(lambda z: u(z), u.dim, interface=plane)


@dataclass(frozen=True)
class BarrierPair:
    lower: object
    upper: object
    eta: float
    densities: tuple


def barrier_pair(u, params: StabilityParams, n=None, order=64):
    """Flat fields on {x_n = -theta eps} with densities M^n(1+delta)/(1-eps) and M^-n(1-delta).

    Both take u's boundary values; eta is the imbalance of their mean density.
    """
    n = u.dim if n is None else n
    lo, hi = params.barrier_densities(n)
    level = -params.theta * params.eps
    return BarrierPair(
        flat_companion(u, level, lo, order),
        flat_companion(u, level, hi, order),
        params.eta(n),
        (lo, hi),
    )


def ball_grid(dim, radius, resolution=64):
    """Uniform grid points with ``resolution`` per axis inside the open ball of the given radius."""
    t = np.linspace(-radius, radius, resolution)
    axes = np.meshgrid(*([t] * dim), indexing="ij")
    pts = np.stack([a.ravel() for a in axes], -1)
    return pts[np.linalg.norm(pts, axis=-1) < radius]


def stability_gap(u, v, grid=64, radius=0.5):
    """sup |u - v| over a grid of B_radius (``grid`` points per axis, at least 64)."""
    if np.isscalar(grid):
        if grid < 64:
            raise PreconditionError("gap grid needs at least 64 points per axis")
        grid = ball_grid(u.dim, radius, int(grid))
    return float(np.max(np.abs(u(grid) - v(grid))))


@dataclass
class StabilityReport:
    theta: float
    delta: float
    eps: float
    gamma: float
    flatness: float
    horizontality: float
    gap: float
    eta: float
    barrier_low: float
    barrier_high: float
    extras: dict = field(default_factory=dict)

    def row(self):
        d = asdict(self)
        d.pop("extras")
        return d


def run_stability(params: StabilityParams, dim=2, family="sinusoid", grid=64, order=64, density=None):
    """One point of the stability experiment.

    The interface is the admissible sinusoid for (theta, eps) and the density
    oscillates within delta of 1 unless given.  barrier_low is
    sup_{B_{1-M eps}}(w_low - u) and barrier_high is sup(u - w_high).
    """
    if family == "sinusoid":
        gamma = admissible_sinusoid(params, dim)
    elif family == "flat":
        gamma = make_test_interface("flat", dim)
    else:
        raise PreconditionError(f"stability family must be 'sinusoid' or 'flat', got {family!r}")
    g = oscillating_density(params.delta) if density is None else as_density(density)
    flat, horiz = check_hypotheses(gamma, g, params)
    u = solve_curved(gamma, g, order=order)
    v = flat_companion(u, -params.theta * params.eps, 1.0, order)
    gap = stability_gap(u, v, grid)
    bars = barrier_pair(u, params, dim, order)
    pts = ball_grid(dim, 1.0 - params.M * params.eps, grid)
    uu = u(pts)
    low = float(np.max(bars.lower(pts) - uu))
    high = float(np.max(uu - bars.upper(pts)))
    return StabilityReport(params.theta, params.delta, params.eps, params.gamma, flat, horiz, gap,
                           bars.eta, low, high, {"family": gamma.family, "interface": gamma.params})


def loglog_slope(x, y):
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def fit_barrier_constant(reports, gamma):
    """Smallest c with max(barrier_low, barrier_high) <= c eps^gamma on the given reports."""
    return max(max(r.barrier_low, r.barrier_high, 0.0) / r.eps**gamma for r in reports)
