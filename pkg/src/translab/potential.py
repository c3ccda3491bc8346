"""Green's function of the ball, single-layer potentials on graph interfaces, Poisson extension.

Convention: Delta_x G(x, y) = delta_y with G(., y) = 0 on the sphere, so G <= 0
and a nonnegative density produces a nonpositive potential.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, EvaluationError, PreconditionError, SingularityError
from .geometry import InterfaceGraph, Integral, make_test_interface
from .quadrature import (
    gauss_legendre,
    graded_breaks,
    grading_levels,
    negative_intervals,
    panel_rule,
    ray_exit,
    trapezoid_circle,
    uniform_breaks,
)

PANEL_NODES = 16
CHUNK = 256


# --------------------------------------------------------------------------- kernel


def _sq(v):
    """Squared norm over the trailing axis (length 2 or 3), without a generic reduction."""
    out = v[..., 0] * v[..., 0] + v[..., 1] * v[..., 1]
    if v.shape[-1] == 3:
        out = out + v[..., 2] * v[..., 2]
    return out


def _image_term(x, y):
    """|x|^2 |y|^2 - 2 x.y + 1, i.e. (|y| |x - y/|y|^2|)^2, finite at y = 0.

    Written as |x - y|^2 + (1 - |x|^2)(1 - |y|^2) to avoid cancellation near the sphere.
    """
    return _sq(x - y) + _rim_factor(x, y)


def _rim_factor(x, y):
    return (1.0 - _sq(x)) * (1.0 - _sq(y))


def _green(x, y):
    n = x.shape[-1]
    d2 = _sq(x - y)
    p = _rim_factor(x, y)
    if n == 2:
        # log(d2 / (d2 + p)); vanishes exactly when either point is on the sphere
        return np.log1p(p / d2) * (-0.25 / np.pi)
    a = np.sqrt(d2)
    b = np.sqrt(d2 + p)
    return -p / (a * b * (a + b)) / (4.0 * np.pi)


def _green_grad(x, y):
    n = x.shape[-1]
    diff = x - y
    d2 = _sq(diff)[..., None]
    im = _image_term(x, y)[..., None]
    imvec = _sq(y)[..., None] * x - y
    if n == 2:
        return (diff / d2 - imvec / im) / (2.0 * np.pi)
    return (diff / d2**1.5 - imvec / im**1.5) / (4.0 * np.pi)


def _check_pair(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != y.shape[-1] or x.shape[-1] not in (2, 3):
        raise DomainError("points must share dimension 2 or 3")
    if np.any(np.sum(y * y, -1) >= 1.0):
        raise DomainError("source point must lie in the open unit ball")
    if np.any(np.sum(x * x, -1) > 1.0 + 1e-14):
        raise DomainError("target point must lie in the closed unit ball")
    if np.any(np.all(x == y, axis=-1)):
        raise SingularityError("G(x, y) is singular at x = y")
    return x, y


def green_ball(x, y, n=None):
    """Green's function of the unit ball, G(x, y) = Phi(x - y) - Phi(|y| (x - y*)).

    Vectorised over leading axes.  The image term is written as
    |x|^2|y|^2 - 2x.y + 1, which is the continuous extension at y = 0.
    """
    x, y = _check_pair(x, y)
    if n is not None and x.shape[-1] != n:
        raise DomainError(f"points are {x.shape[-1]}-dimensional, expected {n}")
    out = _green(x, y)
    return float(out) if np.ndim(out) == 0 else out


def green_gradient(x, y, n=None):
    """Gradient of G(., y) at x."""
    x, y = _check_pair(x, y)
    if n is not None and x.shape[-1] != n:
        raise DomainError(f"points are {x.shape[-1]}-dimensional, expected {n}")
    return _green_grad(x, y)


def _scaled_green(x, y, center, radius):
    n = x.shape[-1]
    if radius == 1.0 and not np.any(center):
        return _green(x, y)
    return radius ** (2 - n) * _green((x - center) / radius, (y - center) / radius)


def _scaled_green_grad(x, y, center, radius):
    n = x.shape[-1]
    return radius ** (1 - n) * _green_grad((x - center) / radius, (y - center) / radius)


# --------------------------------------------------------------------------- densities


@dataclass(frozen=True)
class DensityField:
    """The transmission datum g, a function of points on the interface (trailing axis n)."""

    func: Callable[[np.ndarray], np.ndarray]
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    sup: Optional[float] = None
    holder_alpha: Optional[float] = None
    holder_at_origin: Optional[float] = None
    singular_tangential: tuple = ()

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        vals = np.broadcast_to(np.asarray(self.func(pts), dtype=float), pts.shape[:-1])
        return vals

    @classmethod
    def constant(cls, c):
        c = float(c)
        return cls(lambda p: np.full(p.shape[:-1], c), "constant", {"c": c}, abs(c), 1.0, 0.0)

    @classmethod
    def holder(cls, base=1.0, amp=0.1, beta=0.6):
        """base + amp |x'|^beta: Holder-beta at the origin with seminorm |amp|."""

        def f(p):
            return base + amp * np.linalg.norm(p[..., :-1], axis=-1) ** beta

        return cls(f, "holder", {"base": base, "amp": amp, "beta": beta}, None, beta, abs(amp), (0.0,))

    @classmethod
    def cosine(cls, base=1.0, amp=0.05, freq=np.pi):
        return cls(lambda p: base + amp * np.cos(freq * p[..., 0]), "cosine",
                   {"base": base, "amp": amp, "freq": freq}, abs(base) + abs(amp))

    @classmethod
    def step(cls, left=0.0, right=1.0):
        """Piecewise constant in x_1; bounded but discontinuous at x_1 = 0."""
        return cls(lambda p: np.where(p[..., 0] > 0.0, right, left), "step",
                   {"left": left, "right": right}, max(abs(left), abs(right)), None, None, (0.0,))

    def scaled(self, factor):
        f = self.func
        return DensityField(
            lambda p: factor * np.asarray(f(p), dtype=float),
            self.kind,
            {**self.params, "scale": factor * self.params.get("scale", 1.0)},
            None if self.sup is None else abs(factor) * self.sup,
            self.holder_alpha,
            None if self.holder_at_origin is None else abs(factor) * self.holder_at_origin,
            self.singular_tangential,
        )

    def sup_norm(self, gamma: InterfaceGraph, samples=2001):
        if self.sup is not None:
            return self.sup
        return float(np.max(np.abs(self(gamma.point(_tangential_samples(gamma.dim, samples))))))

    def holder_seminorm_at_origin(self, gamma: InterfaceGraph, alpha, samples=2001):
        """Sampled sup |g(x) - g(0)| / |x|^alpha over the interface."""
        pts = gamma.point(_tangential_samples(gamma.dim, samples))
        r = np.linalg.norm(pts, axis=-1)
        keep = r > 0
        g0 = self(gamma.point(np.zeros((1, gamma.dim - 1))))[0]
        return float(np.max(np.abs(self(pts[keep]) - g0) / r[keep] ** alpha))


def _tangential_samples(dim, samples):
    if dim == 2:
        return np.linspace(-1.0, 1.0, samples)[:, None]
    m = int(np.sqrt(samples)) | 1
    t = np.linspace(-1.0, 1.0, m)
    X, Y = np.meshgrid(t, t, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], -1)
    return pts[np.sum(pts**2, -1) <= 1.0]


def as_density(g):
    if isinstance(g, DensityField):
        return g
    if np.isscalar(g):
        return DensityField.constant(g)
    if callable(g):
        return DensityField(g)
    raise TypeError("density must be a DensityField, a scalar, or a callable")


# --------------------------------------------------------------------------- layer potentials


class _Layer:
    """Single layer of density g on the part of a graph inside the ball B_R(c)."""

    def __init__(self, gamma, density, center, radius, order):
        self.gamma = gamma
        self.density = density
        self.dim = gamma.dim
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.q = int(min(order, PANEL_NODES))
        self.base_count = max(1, int(order) // self.q)

    def _kernel_sum(self, x, yp, w, grad):
        y = self.gamma.point(yp)
        dens = self.density(y) * self.gamma.area_element(yp) * w
        dens = np.broadcast_to(dens, (x.shape[0], dens.shape[-1]))
        xb = x[:, None, :]
        # collapsed grading levels give zero-weight nodes that may sit on the target
        live = dens != 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            if grad:
                k = _scaled_green_grad(xb, y, self.center, self.radius)
                return np.einsum("tnd,tn->td", np.where(live[..., None], k, 0.0), dens)
            k = _scaled_green(xb, y, self.center, self.radius)
            return np.sum(np.where(live, k * dens, 0.0), axis=1)

    def evaluate(self, x, grad=False, with_error=False):
        x = np.asarray(x, dtype=float).reshape(-1, self.dim)
        out = np.zeros((x.shape[0], self.dim)) if grad else np.zeros(x.shape[0])
        err = np.zeros(x.shape[0])
        for s in range(0, x.shape[0], CHUNK):
            blk = slice(s, s + CHUNK)
            val, e = self._evaluate_block(x[blk], grad, with_error)
            out[blk] = val
            err[blk] = e
        return (out, err) if with_error else out

    def _grouped(self, x, base, centers, dists, build, grad, with_error):
        """Sum the kernel over per-target rules, batching targets that need equal grading depth."""
        val = np.zeros((x.shape[0], self.dim)) if grad else np.zeros(x.shape[0])
        err = np.zeros(x.shape[0])
        levels = grading_levels(base, dists)
        for lv in np.unique(levels):
            idx = np.nonzero(levels == lv)[0]
            if lv == 0:
                breaks = base[None, :]
            else:
                breaks = graded_breaks(base, centers[idx], dists[idx])
            yp, w = build(idx, breaks, self.q)
            v = self._kernel_sum(x[idx], yp, w, grad)
            val[idx] = v
            if with_error:
                yp2, w2 = build(idx, breaks, max(2, self.q // 2))
                diff = np.abs(v - self._kernel_sum(x[idx], yp2, w2, grad))
                err[idx] = diff if diff.ndim == 1 else np.max(diff, -1)
        return val, err


class _Layer2D(_Layer):
    def __init__(self, gamma, density, center, radius, order):
        super().__init__(gamma, density, center, radius, order)
        c = self.center
        R = self.radius

        def inside(t):
            return (t - c[0]) ** 2 + (gamma.height(t[:, None]) - c[1]) ** 2 - R**2

        samples = int(max(257, 16 * 2 * R / gamma.feature_scale))
        self.intervals = negative_intervals(inside, c[0] - R, c[0] + R, samples)
        if not self.intervals:
            raise PreconditionError("interface does not meet the ball")
        max_len = min(0.25 * R, gamma.feature_scale)
        self.bases = []
        for a, b in self.intervals:
            base = uniform_breaks(a, b, min(max_len, (b - a) / self.base_count))
            extra = [p for p in tuple(gamma.singular_points) + tuple(density.singular_tangential) if a < p < b]
            self.bases.append(np.unique(np.concatenate([base, extra])))

    def _evaluate_block(self, x, grad, with_error):
        val = np.zeros((x.shape[0], self.dim)) if grad else np.zeros(x.shape[0])
        err = np.zeros(x.shape[0])
        for base in self.bases:
            xp = x[:, 0]
            tgt = np.clip(xp, base[0], base[-1])
            dv = self.gamma.vertical_distance_estimate(np.stack([tgt, x[:, 1]], -1))
            d = np.hypot(xp - tgt, dv)

            def build(idx, breaks, q):
                nodes, w = panel_rule(breaks, q)
                return nodes[..., None], w

            v, e = self._grouped(x, base, tgt, d, build, grad, with_error)
            val += v
            err += e
        return val, err


class _Layer3D(_Layer):
    """Polar rule centred at the target's projection, graded toward the origin of the rays."""

    def __init__(self, gamma, density, center, radius, order, angles=64):
        super().__init__(gamma, density, center, radius, order)
        self.angles = int(angles)
        max_len = min(0.25, 0.5 * self.gamma.feature_scale / self.radius, 1.0 / self.base_count)
        self.base = uniform_breaks(0.0, 1.0, max_len)

    def _domain(self, t):
        return np.sum((t - self.center[:-1]) ** 2, -1) + (self.gamma.height(t) - self.center[-1]) ** 2 - self.radius**2

    def _evaluate_block(self, x, grad, with_error):
        T = x.shape[0]
        xp = x[:, :-1]
        inside = self._domain(xp) < -1e-12 * self.radius**2
        t = np.where(inside[:, None], xp, self.center[:-1])
        d = np.where(inside, self.gamma.vertical_distance_estimate(x), np.linalg.norm(x - self.gamma.point(t), axis=-1))
        phi, wphi = trapezoid_circle(self.angles)
        e = np.stack([np.cos(phi), np.sin(phi)], -1)
        hi = np.full((T, self.angles), 2.5 * self.radius)
        rho_max = ray_exit(lambda r: self._domain(t[:, None, :] + r[..., None] * e), np.zeros_like(hi), hi)
        scale = rho_max.max(axis=1)

        def build(idx, breaks, q):
            s, ws = panel_rule(breaks, q)
            s = np.broadcast_to(s, (idx.size, s.shape[-1]))
            ws = np.broadcast_to(ws, s.shape)
            rm = rho_max[idx]
            rho = s[:, None, :] * rm[:, :, None]
            yp = t[idx, None, None, :] + rho[..., None] * e[None, :, None, :]
            w = ws[:, None, :] * s[:, None, :] * rm[:, :, None] ** 2 * wphi[None, :, None]
            return yp.reshape(idx.size, -1, 2), w.reshape(idx.size, -1)

        return self._grouped(x, self.base, np.zeros(T), d / scale, build, grad, with_error)


def make_layer(gamma, density, center=None, radius=1.0, order=64, angles=64):
    center = np.zeros(gamma.dim) if center is None else np.asarray(center, dtype=float)
    if gamma.dim == 2:
        return _Layer2D(gamma, density, center, radius, order)
    return _Layer3D(gamma, density, center, radius, order, angles)


# --------------------------------------------------------------------------- Poisson extension


class _Poisson:
    """Poisson integral of boundary data f over the sphere of B_R(c)."""

    def __init__(self, f, dim, center=None, radius=1.0, min_nodes=64, max_nodes=4096):
        self.f = f
        self.dim = dim
        self.center = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.min_nodes = min_nodes
        self.max_nodes = max_nodes
        self._cache = {}

    def _nodes(self, rmax):
        # geometric convergence rate rmax^m of the periodic rule
        m = int(np.ceil(np.log(1e-16) / np.log(max(rmax, 1e-3)))) + 8
        m = int(np.clip(m, self.min_nodes, self.max_nodes))
        if self.dim == 3:
            m = min(m, 384)
        m = 1 << int(np.ceil(np.log2(m)))
        if m not in self._cache:
            if self.dim == 2:
                phi, w = trapezoid_circle(m)
                zeta = np.stack([np.cos(phi), np.sin(phi)], -1)
                w = w / (2.0 * np.pi)
            else:
                ct, wt = gauss_legendre(m)
                phi, wphi = trapezoid_circle(2 * m)
                C, P = np.meshgrid(ct, phi, indexing="ij")
                S = np.sqrt(1.0 - C**2)
                zeta = np.stack([S * np.cos(P), S * np.sin(P), C], -1).reshape(-1, 3)
                w = (wt[:, None] * wphi[None, :]).ravel() / (4.0 * np.pi)
            vals = np.asarray(self.f(self.center + self.radius * zeta), dtype=float)
            vals = np.broadcast_to(vals, zeta.shape[:-1])
            if not np.all(np.isfinite(vals)):
                raise EvaluationError("boundary data produced non-finite samples")
            self._cache[m] = (zeta, w * vals)
        return self._cache[m]

    def evaluate(self, x, grad=False, with_error=False):
        x = np.asarray(x, dtype=float).reshape(-1, self.dim)
        z = (x - self.center) / self.radius
        r = np.linalg.norm(z, axis=-1)
        on = r >= 1.0 - 1e-12
        out = np.zeros((x.shape[0], self.dim)) if grad else np.zeros(x.shape[0])
        err = np.zeros(x.shape[0])
        inner = ~on
        if np.any(inner):
            zi = z[inner]
            zeta, wf = self._nodes(float(r[inner].max()))
            val = self._sum(zi, zeta, wf, grad)
            out[inner] = val / self.radius if grad else val
            if with_error:
                zeta2, wf2 = zeta[::2], 2.0 * wf[::2]
                if self.dim == 2:
                    coarse = self._sum(zi, zeta2, wf2, grad)
                    coarse = coarse / self.radius if grad else coarse
                    diff = np.abs(out[inner] - coarse)
                    err[inner] = diff if diff.ndim == 1 else diff.max(-1)
        if np.any(on):
            if grad:
                out[on] = np.nan
            else:
                zon = z[on] / r[on, None]
                out[on] = np.broadcast_to(np.asarray(self.f(self.center + self.radius * zon), dtype=float), zon.shape[:-1])
        return (out, err) if with_error else out

    def _sum(self, z, zeta, wf, grad):
        out = []
        for s in range(0, z.shape[0], CHUNK):
            zb = z[s : s + CHUNK, None, :]
            diff = zb - zeta[None]
            d2 = np.sum(diff * diff, -1)
            one = 1.0 - np.sum(zb * zb, -1)
            p = self.dim
            if not grad:
                out.append(np.sum(one / d2 ** (p / 2) * wf, -1) * (1.0 if p == 2 else 1.0))
            else:
                k = -2.0 * zb / d2[..., None] ** (p / 2) - p * one[..., None] * diff / d2[..., None] ** (p / 2 + 1)
                out.append(np.einsum("tnd,n->td", k, wf))
        return np.concatenate(out, axis=0)


# --------------------------------------------------------------------------- solution fields


class SolutionField:
    """A potential assembled as a linear combination of layer and harmonic components.

    Evaluation accepts a single point of shape (n,) or a batch (..., n).
    ``side`` classifies points as above (+1), below (-1) or on (0) the interface.
    """

    def __init__(self, terms, dim, interface=None, density=None, center=None, radius=1.0, label=""):
        self.terms = list(terms)
        self.dim = dim
        self.interface = interface
        self.density = density
        self.center = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.label = label

    def _run(self, x, grad, with_error):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise DomainError(f"expected points with {self.dim} components")
        lead = x.shape[:-1]
        flat = x.reshape(-1, self.dim)
        out = np.zeros((flat.shape[0], self.dim)) if grad else np.zeros(flat.shape[0])
        err = np.zeros(flat.shape[0])
        for coef, comp in self.terms:
            if coef == 0.0:
                continue
            if with_error:
                v, e = comp.evaluate(flat, grad=grad, with_error=True)
                err += abs(coef) * e
            else:
                v = comp.evaluate(flat, grad=grad)
            out += coef * v
        if with_error and self.interface is not None:
            on = np.abs(self.interface.signed_height(flat)) < 1e-14
            err[on] *= 10.0
        shape = lead + ((self.dim,) if grad else ())
        out = out.reshape(shape)
        if with_error:
            return out, err.reshape(lead)
        return out

    def __call__(self, x):
        out = self._run(x, False, False)
        return float(out) if np.ndim(out) == 0 else out

    def evaluate(self, x, with_error=False):
        """Values, or (values, error estimates) when ``with_error`` is set.

        Points lying exactly on the interface are evaluated through the
        integrable kernel and carry a tenfold error bar.
        """
        return self._run(x, False, with_error)

    def gradient(self, x):
        return self._run(x, True, False)

    def side(self, x):
        if self.interface is None:
            raise PreconditionError("field has no interface to classify against")
        h = self.interface.signed_height(np.asarray(x, dtype=float))
        return np.sign(h).astype(int)

    def _combine(self, other, sign):
        terms = self.terms + [(sign * c, comp) for c, comp in other.terms]
        return SolutionField(terms, self.dim, self.interface, self.density, self.center, self.radius,
                             f"({self.label}{'+' if sign > 0 else '-'}{other.label})")

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, c):
        return SolutionField([(c * k, comp) for k, comp in self.terms], self.dim, self.interface,
                             self.density, self.center, self.radius, f"{c}*{self.label}")

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0


def single_layer_solve(gamma: InterfaceGraph, g, order=64, angles=64):
    """Distributional solution with zero boundary values: u(x) = int_Gamma G(x, y) g(y) dH.

    The integral runs over the part of the graph inside the unit ball.  Near
    targets get panels graded geometrically toward their projection, so
    evaluations at any distance from the interface, including on it, use the
    same rule.
    """
    g = as_density(g)
    h = np.abs(gamma.height(_tangential_samples(gamma.dim, 2001)))
    if np.any(h >= 1.0):
        raise PreconditionError("interface must stay in the band |psi| < 1")
    layer = make_layer(gamma, g, order=order, angles=angles)
    return SolutionField([(1.0, layer)], gamma.dim, gamma, g, label="u")


def poisson_extend(f, n, center=None, radius=1.0, interface=None):
    """Harmonic extension into the ball of continuous boundary data ``f``.

    ``f`` maps sphere points (m, n) to m values.
    """
    comp = _Poisson(f, n, center, radius)
    return SolutionField([(1.0, comp)], n, interface, None, center, radius, label="h")


def layer_field(gamma, g, center=None, radius=1.0, order=64, angles=64, label="layer"):
    """Single layer on ``gamma`` inside B_radius(center) with that ball's Green kernel."""
    g = as_density(g)
    layer = make_layer(gamma, g, center, radius, order, angles)
    return SolutionField([(1.0, layer)], gamma.dim, gamma, g, center, radius, label)


def zero_field(n, interface=None):
    return SolutionField([], n, interface, DensityField.constant(0.0), label="0")


# --------------------------------------------------------------------------- test functions


@dataclass(frozen=True)
class TestFunction:
    """Polynomial bump (1 - |x - x0|^2 / r^2)^4 supported in B_r(x0), with exact Laplacian."""

    center: np.ndarray
    radius: float

    __test__ = False

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if np.linalg.norm(self.center) + self.radius >= 1.0:
            raise DomainError("test-function support must lie inside the unit ball")

    def _s(self, x):
        x = np.asarray(x, dtype=float)
        return np.sum((x - self.center) ** 2, -1) / self.radius**2

    def __call__(self, x):
        s = self._s(x)
        return np.where(s < 1.0, (1.0 - s) ** 4, 0.0)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        s = self._s(x)[..., None]
        g = -8.0 * (1.0 - s) ** 3 * (x - self.center) / self.radius**2
        return np.where(s < 1.0, g, 0.0)

    def laplacian(self, x):
        s = self._s(x)
        n = self.center.size
        val = -8.0 / self.radius**2 * (1.0 - s) ** 2 * (n * (1.0 - s) - 6.0 * s)
        return np.where(s < 1.0, val, 0.0)


@dataclass(frozen=True)
class DistributionalResidual:
    residual: float
    volume: Integral
    surface: Integral


def verify_distributional(u: SolutionField, gamma: InterfaceGraph, g, phi: TestFunction, order=32):
    """|int u Delta(phi) dx - int_Gamma g phi dH| with both integrals and their error estimates.

    The volume rule splits every vertical segment of supp(phi) at the
    interface, so each piece integrates a function smooth up to its ends.
    """
    from .volume import ball_rule, chord_rule

    g = as_density(g)

    def volume(q):
        pts, w = ball_rule(gamma, phi.center, phi.radius, q)
        return float(np.sum(w * u(pts) * phi.laplacian(pts)))

    def surface(q):
        yp, w = chord_rule(gamma, phi.center, phi.radius, q)
        if yp.shape[0] == 0:
            return 0.0
        y = gamma.point(yp)
        return float(np.sum(w * g(y) * phi(y) * gamma.area_element(yp)))

    v1, v2 = volume(order), volume(max(2, order // 2))
    s1, s2 = surface(order), surface(max(2, order // 2))
    vol = Integral(v1, abs(v1 - v2))
    surf = Integral(s1, abs(s1 - s2))
    return DistributionalResidual(abs(v1 - s1), vol, surf)


def flat_interface(n, level=0.0):
    return make_test_interface("flat", n, level=level)
