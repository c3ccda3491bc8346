"""Flat-interface transmission problems in a ball and one-sided traces up to the interface."""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .geometry import make_test_interface
from .potential import as_density, layer_field, poisson_extend


@dataclass(frozen=True)
class FlatSlab:
    """The ball B_r(0', a) cut by the hyperplane {x_n = a}.

    With ``centered=False`` the ball is B_r(0) instead, so the plane sits at
    height a inside it; this is the shifted configuration used by companions
    in the unit ball and requires |a| < r.
    """

    radius: float = 1.0
    height: float = 0.0
    dim: int = 2
    centered: bool = True

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError("slab radius must be positive")
        if abs(self.height) >= self.radius:
            raise DomainError(f"|a| = {abs(self.height)} must be below r = {self.radius}")
        if self.dim not in (2, 3):
            raise DomainError("dimension must be 2 or 3")

    @property
    def center(self):
        c = np.zeros(self.dim)
        if self.centered:
            c[-1] = self.height
        return c

    def in_ball(self, x):
        return np.linalg.norm(np.asarray(x, dtype=float) - self.center, axis=-1) < self.radius

    def on_disk(self, x):
        x = np.asarray(x, dtype=float)
        return self.in_ball(x) & (x[..., -1] == self.height)

    def upper(self, x):
        x = np.asarray(x, dtype=float)
        return self.in_ball(x) & (x[..., -1] > self.height)

    def lower(self, x):
        x = np.asarray(x, dtype=float)
        return self.in_ball(x) & (x[..., -1] < self.height)

    def interface(self):
        return make_test_interface("flat", self.dim, level=self.height)


def flat_solve(slab: FlatSlab, g, f=None, order=64):
    """Solution of Delta v = g dH on the flat disk with v = f on the sphere of the slab's ball.

    Assembled as the single layer with the ball's own Green kernel plus the
    Poisson extension of ``f`` (omitted when ``f`` is None, i.e. zero data).
    """
    gamma = slab.interface()
    v = layer_field(gamma, as_density(g), slab.center, slab.radius, order, label="v")
    if f is not None:
        v = v + poisson_extend(f, slab.dim, slab.center, slab.radius, interface=gamma)
    return v


def rescaled_density(g, r, a):
    """g~(x) = r g(r x', r x_n + a), the density of the normalised problem on B_1."""
    g = as_density(g)

    def func(p):
        q = np.array(p, dtype=float, copy=True)
        q[..., :-1] *= r
        q[..., -1] = r * q[..., -1] + a
        return r * g(q)

    return func


@dataclass(frozen=True)
class OneSidedDerivative:
    value: np.ndarray
    error: float
    converged: bool
    table: np.ndarray


def richardson(samples, ratio=2.0):
    """Order-1-start Richardson table for samples at t, t/ratio, t/ratio^2, ...

    Returns (limit, error, converged, table) where ``error`` is the change
    between the last two levels of the table and ``converged`` says the
    level-to-level changes shrank.
    """
    samples = np.asarray(samples, dtype=float)
    m = samples.shape[0]
    table = np.full((m, m) + samples.shape[1:], np.nan)
    table[:, 0] = samples
    for k in range(1, m):
        f = ratio**k
        for j in range(m - k):
            table[j, k] = (f * table[j + 1, k - 1] - table[j, k - 1]) / (f - 1.0)
    diffs = [np.max(np.abs(table[0, k] - table[0, k - 1])) for k in range(1, m)]
    converged = all(b <= a * 1.0001 + 1e-15 for a, b in zip(diffs[:-1], diffs[1:]))
    return table[0, m - 1], float(diffs[-1]) if diffs else np.inf, converged, table


def one_sided_derivative(v, x, side, t0=0.05, rungs=8):
    """Gradient of v at the interface point x, approached from one side.

    Gradients at x + side * t * nu for t = t0, t0/2, ... are extrapolated to
    t = 0.  ``side`` is +1 (the side the upward normal points into) or -1.
    """
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    gamma = v.interface
    if gamma is None:
        raise PreconditionError("field has no interface")
    x = np.asarray(x, dtype=float)
    nu = gamma.normal(x[:-1])
    ts = t0 * 0.5 ** np.arange(rungs)
    pts = x[None, :] + side * ts[:, None] * nu[None, :]
    grads = v.gradient(pts)
    value, err, ok, table = richardson(grads)
    return OneSidedDerivative(value, err, ok, table)


def normal_jump(v, x, t0=0.05, rungs=8):
    """(grad v^+ - grad v^-) . nu at x and its extrapolation error."""
    plus = one_sided_derivative(v, x, 1, t0, rungs)
    minus = one_sided_derivative(v, x, -1, t0, rungs)
    nu = v.interface.normal(np.asarray(x, dtype=float)[:-1])
    return float((plus.value - minus.value) @ nu), plus.error + minus.error


def symmetric_grid(dim, resolution=33, radius=0.95, height=0.0):
    """Points with x_n > height on a uniform grid inside B_radius, for reflection tests."""
    t = np.linspace(-radius, radius, resolution)
    axes = np.meshgrid(*([t] * dim), indexing="ij")
    pts = np.stack([a.ravel() for a in axes], -1)
    pts[:, -1] += height
    keep = (np.linalg.norm(pts - np.eye(dim)[-1] * height, axis=-1) < radius) & (pts[:, -1] > height)
    return pts[keep]


def reflection_check(v, grid=None, height=0.0):
    """max |v(x', x_n) - v(x', 2a - x_n)| over the grid (reflection through x_n = a)."""
    if grid is None:
        grid = symmetric_grid(v.dim, height=height)
    elif np.isscalar(grid):
        grid = symmetric_grid(v.dim, int(grid), height=height)
    grid = np.asarray(grid, dtype=float)
    mirror = grid.copy()
    mirror[:, -1] = 2.0 * height - mirror[:, -1]
    return float(np.max(np.abs(v(grid) - v(mirror))))
