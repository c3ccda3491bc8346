"""Graph interfaces x_n = psi(x') and their elementary geometry.

An interface is a closed-form profile with an exact gradient, so normals and
area elements carry no differentiation error.  Points are arrays whose last
axis has length ``n``; tangential points ``x'`` have last axis ``n - 1``.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, NamedTuple

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .errors import ConfigError, DomainError, EvaluationError, PreconditionError
from .quadrature import gauss_legendre, trapezoid_circle

FAMILIES = ("flat", "linear", "sinusoid", "cusp", "custom")


@dataclass(frozen=True)
class InterfaceGraph:
    """The interface {(x', psi(x'))} over the unit (n-1)-ball.

    ``profile`` and ``gradient`` act on arrays of tangential points with
    trailing axis ``n - 1``.  ``feature_scale`` bounds the length over which
    the profile changes appreciably and drives panel sizes; ``singular_points``
    lists tangential points where the profile is not smooth.
    """

    dim: int
    profile: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    family: str = "custom"
    params: dict = field(default_factory=dict)
    alpha0: Optional[float] = None
    holder_bound: Optional[float] = None
    feature_scale: float = 1.0
    singular_points: tuple = ()
    upward: bool = True

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ConfigError(f"dimension must be 2 or 3, got {self.dim}")

    def height(self, xp):
        return np.asarray(self.profile(np.asarray(xp, dtype=float)), dtype=float)

    def grad(self, xp):
        return np.asarray(self.gradient(np.asarray(xp, dtype=float)), dtype=float)

    def area_element(self, xp):
        g = self.grad(xp)
        return np.sqrt(1.0 + np.sum(g * g, axis=-1))

    def point(self, xp):
        xp = np.asarray(xp, dtype=float)
        return np.concatenate([xp, self.height(xp)[..., None]], axis=-1)

    def normal(self, xp):
        """Unit normal; upward (into the region above the graph) unless ``upward`` is False."""
        g = self.grad(xp)
        nu = np.concatenate([-g, np.ones(g.shape[:-1] + (1,))], axis=-1)
        nu = nu / np.sqrt(1.0 + np.sum(g * g, axis=-1))[..., None]
        return nu if self.upward else -nu

    def flipped(self):
        """Same interface with the opposite normal orientation."""
        return InterfaceGraph(**{**self.__dict__, "upward": not self.upward})

    def signed_height(self, x):
        """x_n - psi(x'): positive above the graph, negative below."""
        x = np.asarray(x, dtype=float)
        return x[..., -1] - self.height(x[..., :-1])

    def vertical_distance_estimate(self, x):
        """|x_n - psi(x')| * nu_n(x'), a first-order estimate of dist(x, graph)."""
        x = np.asarray(x, dtype=float)
        xp = x[..., :-1]
        return np.abs(x[..., -1] - self.height(xp)) / self.area_element(xp)


class InterfaceSample(NamedTuple):
    point: np.ndarray
    normal: np.ndarray
    area_element: np.ndarray


class Integral(NamedTuple):
    """A quadrature value with an a-posteriori error estimate."""

    value: float
    error: float


@dataclass(frozen=True)
class StabilityParams:
    """Flatness theta, horizontality eps, density oscillation delta, Holder exponent gamma.

    Zero values of theta, eps and delta are accepted as the degenerate flat case.
    """

    theta: float
    eps: float
    delta: float
    gamma: float = 0.5

    def __post_init__(self):
        bad = []
        if not 0.0 <= self.theta < 0.5:
            bad.append(f"theta={self.theta} not in [0, 1/2)")
        if not 0.0 <= self.eps < 0.5:
            bad.append(f"eps={self.eps} not in [0, 1/2)")
        if not 0.0 <= self.delta < 1.0:
            bad.append(f"delta={self.delta} not in [0, 1)")
        if not 0.0 < self.gamma < 1.0:
            bad.append(f"gamma={self.gamma} not in (0, 1)")
        if bad:
            raise PreconditionError("; ".join(bad))

    @property
    def M(self):
        return 1.0 + 2.0 * self.theta

    def barrier_densities(self, n):
        """Densities (lower barrier, upper barrier) of the flat sandwich fields."""
        Mn = self.M**n
        return Mn * (1.0 + self.delta) / (1.0 - self.eps), (1.0 - self.delta) / Mn

    def eta(self, n):
        lo, hi = self.barrier_densities(n)
        return 0.5 * (lo + hi) - 1.0

    def eta_abs_expanded(self, n):
        """|eta| through the common-denominator form; an independent route to the same number."""
        M, d, e = self.M, self.delta, self.eps
        num = M ** (2 * n) * (1.0 + d) + (1.0 - d) * (1.0 - e) - 2.0 * (1.0 - e) * M**n
        return abs(num) / (2.0 * (1.0 - e) * M**n)

    def max_slope(self):
        """Largest |grad psi| compatible with eps-horizontality."""
        return float(np.sqrt((1.0 - self.eps) ** -2 - 1.0))


def _as_tangential(xp, dim):
    xp = np.asarray(xp, dtype=float)
    if dim == 2 and xp.ndim == 0:
        xp = xp[None]
    if xp.shape[-1] != dim - 1:
        raise DomainError(f"tangential point must have {dim - 1} components")
    return xp


def eval_interface(gamma: InterfaceGraph, xp):
    """Point on the graph, upward unit normal and area element at ``x'``."""
    xp = _as_tangential(xp, gamma.dim)
    if np.any(np.linalg.norm(xp, axis=-1) >= 1.0):
        raise DomainError("x' must lie in the open unit (n-1)-ball")
    return InterfaceSample(gamma.point(xp), gamma.normal(xp), gamma.area_element(xp))


def _tangential_grid(dim, resolution):
    t = np.linspace(-1.0, 1.0, resolution)
    if dim == 2:
        return t[:, None]
    X, Y = np.meshgrid(t, t, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=-1)
    return pts[np.sum(pts**2, axis=-1) <= 1.0]


def _polish_max(func, x0, dim):
    """Locally maximise ``func`` over the closed unit (n-1)-ball starting at x0."""
    if dim == 2:
        h = 2.0 / 64
        lo, hi = max(-1.0, x0[0] - h), min(1.0, x0[0] + h)
        res = minimize_scalar(lambda s: -func(np.array([s])), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        return max(-res.fun, func(x0))
    cons = {"type": "ineq", "fun": lambda z: 1.0 - z @ z}
    res = minimize(lambda z: -func(z), x0, constraints=[cons], method="SLSQP", options={"ftol": 1e-14})
    val = -res.fun if res.success and res.x @ res.x <= 1.0 + 1e-12 else -np.inf
    return max(val, func(x0))


def flatness_horizontality(gamma: InterfaceGraph, resolution=256):
    """(sup |psi|, min nu_n) over the unit (n-1)-ball.

    A grid scan followed by local polishing of the best grid points; compare
    the results against theta*eps and 1 - eps.
    """
    if resolution < 64:
        raise PreconditionError("grid resolution must be at least 64 points per axis")
    pts = _tangential_grid(gamma.dim, resolution)
    h = np.abs(gamma.height(pts))
    s = np.sum(gamma.grad(pts) ** 2, axis=-1)
    flat = float(h.max())
    slope2 = float(s.max())
    for idx in np.argsort(h)[-3:]:
        flat = max(flat, _polish_max(lambda z: float(np.abs(gamma.height(z))), pts[idx], gamma.dim))
    for idx in np.argsort(s)[-3:]:
        slope2 = max(slope2, _polish_max(lambda z: float(np.sum(gamma.grad(z) ** 2)), pts[idx], gamma.dim))
    return flat, 1.0 / np.sqrt(1.0 + slope2)


def unit_ball_rule(dim, order):
    """Quadrature nodes/weights over the unit (n-1)-ball: Gauss on [-1,1] or a polar tensor rule."""
    if dim == 2:
        x, w = gauss_legendre(order)
        return x[:, None], w.copy()
    r, wr = gauss_legendre(order)
    r = 0.5 * (r + 1.0)
    wr = 0.5 * wr * r
    phi, wphi = trapezoid_circle(2 * order)
    R, P = np.meshgrid(r, phi, indexing="ij")
    pts = np.stack([R * np.cos(P), R * np.sin(P)], axis=-1).reshape(-1, 2)
    return pts, (wr[:, None] * wphi[None, :]).ravel()


def surface_integral(gamma: InterfaceGraph, f, order=64):
    """Integral of ``f`` over the graph above the unit (n-1)-ball.

    ``f`` maps points of shape (m, n) to m values.  The error is the change
    under doubling of the order.
    """

    def at(q):
        xp, w = unit_ball_rule(gamma.dim, q)
        vals = np.asarray(f(gamma.point(xp)), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise EvaluationError("surface integrand produced non-finite samples")
        return float(np.sum(w * vals * gamma.area_element(xp)))

    coarse, fine = at(order), at(2 * order)
    return Integral(fine, abs(fine - coarse))


@dataclass(frozen=True)
class InclusionRadii:
    """Radii of the tangential disks sandwiching the chord set; None marks an empty set."""

    inner: Optional[float]
    outer: Optional[float]


def medidas_radii(params: StabilityParams, x):
    """Inner and outer tangential radii for the ball B_eps(x) against the level -theta*eps.

    outer = sqrt((M eps)^2 - (x_n + theta eps)^2) and
    inner = sqrt(eps^2 - (x_n + theta eps)^2); the inner disk is empty once
    x_n >= (1 - theta) eps or the radicand is negative.
    """
    x = np.asarray(x, dtype=float)
    xn = float(x[-1])
    te = params.theta * params.eps
    shift2 = (xn + te) ** 2
    rad_out = (params.M * params.eps) ** 2 - shift2
    outer = float(np.sqrt(rad_out)) if rad_out >= 0.0 else None
    rad_in = params.eps**2 - shift2
    if xn >= (1.0 - params.theta) * params.eps or rad_in < 0.0:
        inner = None
    else:
        inner = float(np.sqrt(rad_in))
    return InclusionRadii(inner, outer)


def _flat(dim, level=0.0):
    level = float(level)
    return InterfaceGraph(
        dim,
        lambda xp: np.full(xp.shape[:-1], level),
        lambda xp: np.zeros(xp.shape),
        family="flat",
        params={"level": level},
        alpha0=1.0,
        holder_bound=0.0,
    )


def _linear(dim, slope):
    s = np.atleast_1d(np.asarray(slope, dtype=float))
    if s.size != dim - 1:
        raise ConfigError(f"linear family needs {dim - 1} slope component(s)")
    return InterfaceGraph(
        dim,
        lambda xp: xp @ s,
        lambda xp: np.broadcast_to(s, xp.shape).copy(),
        family="linear",
        params={"slope": s.tolist()},
        alpha0=1.0,
        holder_bound=0.0,
    )


def _sinusoid(dim, amp, freq, phase=0.0):
    amp, freq, phase = float(amp), float(freq), float(phase)
    if freq <= 0:
        raise ConfigError("sinusoid frequency must be positive")

    def grad(xp):
        g = np.zeros(xp.shape)
        g[..., 0] = amp * freq * np.cos(freq * xp[..., 0] + phase)
        return g

    return InterfaceGraph(
        dim,
        lambda xp: amp * np.sin(freq * xp[..., 0] + phase),
        grad,
        family="sinusoid",
        params={"amp": amp, "freq": freq, "phase": phase},
        alpha0=1.0,
        holder_bound=abs(amp) * freq**2,
        feature_scale=min(1.0, 1.0 / freq),
    )


def _cusp(dim, c, alpha0):
    c, alpha0 = float(c), float(alpha0)
    if not 0.0 < alpha0 < 1.0:
        raise ConfigError(f"cusp exponent alpha0 must lie in (0, 1), got {alpha0}")
    p = 1.0 + alpha0

    def grad(xp):
        r = np.linalg.norm(xp, axis=-1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = c * p * r ** (alpha0 - 1.0) * xp
        return np.where(r > 0, g, 0.0)

    return InterfaceGraph(
        dim,
        lambda xp: c * np.linalg.norm(xp, axis=-1) ** p,
        grad,
        family="cusp",
        params={"c": c, "alpha0": alpha0},
        alpha0=alpha0,
        # |grad psi| = c p r^alpha0 radially; the Holder quotient peaks at antipodal pairs
        holder_bound=abs(c) * p * 2.0 ** (1.0 - alpha0),
        singular_points=(0.0,),
    )


def make_test_interface(family, dim=2, **params):
    """Build a named interface family.

    flat(level=0), linear(slope), sinusoid(amp, freq, phase=0),
    cusp(c, alpha0) for c|x'|^(1+alpha0), custom(profile, gradient, ...).
    """
    try:
        if family == "flat":
            return _flat(dim, **params)
        if family == "linear":
            return _linear(dim, **params)
        if family == "sinusoid":
            return _sinusoid(dim, **params)
        if family == "cusp":
            return _cusp(dim, **params)
        if family == "custom":
            return InterfaceGraph(dim, family="custom", **params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for family {family!r}: {exc}") from None
    raise ConfigError(f"unknown interface family {family!r}; expected one of {FAMILIES}")


def admissible_sinusoid(params: StabilityParams, dim=2, freq=10.0, margin=0.99):
    """Sinusoid that is theta*eps-flat and eps-horizontal at once.

    The amplitude is ``margin * theta * eps`` (strict flatness) and the
    frequency is lowered if needed so that the peak slope stays within the
    horizontality bound.
    """
    amp = margin * params.theta * params.eps
    if amp > 0:
        freq = min(freq, margin * params.max_slope() / amp)
    return make_test_interface("sinusoid", dim, amp=amp, freq=freq)


def c1alpha_seminorm_at_origin(gamma: InterfaceGraph, alpha, samples=4001):
    """Sampled sup |grad psi(x') - grad psi(0)| / |x'|^alpha over the unit (n-1)-ball."""
    if gamma.dim == 2:
        xp = np.linspace(-1.0, 1.0, samples)[:, None]
    else:
        xp = _tangential_grid(3, int(np.sqrt(samples)) | 1)
    r = np.linalg.norm(xp, axis=-1)
    keep = r > 0
    g0 = gamma.grad(np.zeros((1, gamma.dim - 1)))[0]
    diff = np.linalg.norm(gamma.grad(xp[keep]) - g0, axis=-1)
    return float(np.max(diff / r[keep] ** alpha)) if keep.any() else 0.0
