"""Dyadic linear-polynomial fits at an interface point and the exponents they reveal.

The fits are a measurement: on balls of radius lam^k around a point of the
interface, each side of the solution is approximated by a least-squares linear
polynomial and the sup residual is recorded.  Geometric decay of the residuals
like lam^(k(1+alpha)) is read off as a C^{1,alpha} exponent.
"""

import warnings
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.stats import qmc

from .errors import InsufficientDataError, PreconditionError
from .geometry import InterfaceGraph, c1alpha_seminorm_at_origin, make_test_interface
from .potential import DensityField, as_density, single_layer_solve

# radii below this are not trusted to carry more than quadrature noise
RESOLVABLE_RADIUS = 1e-5


@dataclass(frozen=True)
class LinearPolynomial:
    """P(x) = A.x + B."""

    A: np.ndarray
    B: float

    def __post_init__(self):
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))
        object.__setattr__(self, "B", float(self.B))
        if not (np.all(np.isfinite(self.A)) and np.isfinite(self.B)):
            raise ValueError("polynomial coefficients must be finite")

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.A + self.B

    @property
    def tangential(self):
        return self.A[:-1]

    @property
    def normal_slope(self):
        return float(self.A[-1])

    def size(self):
        return float(np.sum(np.abs(self.A)) + abs(self.B))

    @classmethod
    def fit(cls, x, y, center=None):
        """Least-squares fit to samples; ``center`` only conditions the design matrix."""
        x = np.asarray(x, dtype=float)
        c = np.zeros(x.shape[-1]) if center is None else np.asarray(center, dtype=float)
        design = np.concatenate([x - c, np.ones((x.shape[0], 1))], axis=1)
        coef, *_ = np.linalg.lstsq(design, np.asarray(y, dtype=float), rcond=None)
        A = coef[:-1]
        return cls(A, coef[-1] - A @ c)

    @classmethod
    def fit_linear_part(cls, x, y, center=None):
        """Linear part at ``center`` of a least-squares quadratic fit.

        On one side of a flat interface the solution is smooth, so a plain
        linear fit on a ball of radius r carries an O(r) slope bias from the
        curvature; the quadratic terms absorb it and leave an O(r^2) bias.
        """
        x = np.asarray(x, dtype=float)
        n = x.shape[-1]
        c = np.zeros(n) if center is None else np.asarray(center, dtype=float)
        z = x - c
        i, j = np.triu_indices(n)
        design = np.concatenate([z, z[:, i] * z[:, j], np.ones((x.shape[0], 1))], axis=1)
        coef, *_ = np.linalg.lstsq(design, np.asarray(y, dtype=float), rcond=None)
        A = coef[:n]
        return cls(A, coef[-1] - A @ c)


# --------------------------------------------------------------------------- normalisation


@dataclass
class NormalizedProblem:
    """Fields after the normalisation, with the multipliers that undo it.

    The normalised potential is ``u_scale * u`` (on the possibly rescaled
    interface) and the normalised density is ``g_scale * g``.
    """

    u: object
    g: DensityField
    gamma: InterfaceGraph
    u_scale: float
    g_scale: float
    psi_scale: float
    harmonic_path: bool
    g0: float
    steps: List[str] = field(default_factory=list)


def _sup_on_ball(u, dim, resolution=65):
    t = np.linspace(-1.0, 1.0, resolution)
    axes = np.meshgrid(*([t] * dim), indexing="ij")
    pts = np.stack([a.ravel() for a in axes], -1)
    pts = pts[np.linalg.norm(pts, axis=-1) <= 1.0]
    return float(np.max(np.abs(u(pts))))


def _origin_value(g, gamma):
    return float(g(gamma.point(np.zeros((1, gamma.dim - 1))))[0])


def _scaled_interface(gamma, factor):
    prof, grad = gamma.profile, gamma.gradient
    params = {**gamma.params, "scale": factor * gamma.params.get("scale", 1.0)}
    return InterfaceGraph(
        gamma.dim,
        lambda xp: factor * prof(xp),
        lambda xp: factor * grad(xp),
        gamma.family,
        params,
        gamma.alpha0,
        None if gamma.holder_bound is None else factor * gamma.holder_bound,
        gamma.feature_scale,
        gamma.singular_points,
        gamma.upward,
    )


def normalize(u, g, gamma: InterfaceGraph, delta0=0.05, alpha=0.5, solver=None, u_sup=None):
    """Bring (u, g, psi) to the normalised regime used by the dyadic fits.

    1. psi(0') = 0 and grad psi(0') = 0 are required (no rotation is done).
    2. If g(0) > 0, u and g are divided by g(0); if g(0) = 0 the step is
       skipped and ``harmonic_path`` is set.
    3. If ||u||_inf > 1 or [g]_{C^alpha}(0) > delta0, u and g are multiplied
       by delta0 / (||u||_inf + [g]_{C^alpha}(0)); already small data is left alone.
    4. If [psi]_{C^{1,alpha}} > delta0, psi is scaled to have seminorm delta0
       and u is recomputed with ``solver(gamma, g)`` (single layer by default).
    """
    g = as_density(g)
    zero = np.zeros((1, gamma.dim - 1))
    if abs(float(gamma.height(zero)[0])) > 1e-14:
        raise PreconditionError("the interface must pass through the origin")
    if np.max(np.abs(gamma.grad(zero))) > 1e-14:
        raise PreconditionError("grad psi(0') must vanish; rotating the interface is not supported")
    g0 = _origin_value(g, gamma)
    if g0 < 0:
        raise PreconditionError(f"g(0) = {g0} is negative")
    u_scale = g_scale = psi_scale = 1.0
    steps = []
    harmonic = g0 == 0.0
    if not harmonic and g0 != 1.0:
        u_scale /= g0
        g_scale /= g0
        steps.append(f"divide by g(0) = {g0:.6g}")
    sup_u = (_sup_on_ball(u, gamma.dim) if u_sup is None else float(u_sup)) * u_scale
    semi = g.holder_seminorm_at_origin(gamma, alpha) * g_scale
    if sup_u > 1.0 or semi > delta0:
        m = delta0 / (sup_u + semi)
        u_scale *= m
        g_scale *= m
        steps.append(f"scale by delta0/(|u| + [g]) = {m:.6g}")
    gnew = g.scaled(g_scale) if g_scale != 1.0 else g
    seminorm_psi = gamma.holder_bound if gamma.holder_bound is not None else c1alpha_seminorm_at_origin(gamma, alpha)
    unew = u * u_scale if u_scale != 1.0 else u
    gamma_new = gamma
    if seminorm_psi > delta0:
        psi_scale = delta0 / seminorm_psi
        gamma_new = _scaled_interface(gamma, psi_scale)
        solve = solver if solver is not None else single_layer_solve
        unew = solve(gamma_new, gnew)
        steps.append(f"flatten psi by {psi_scale:.6g} and re-solve")
    return NormalizedProblem(unew, gnew, gamma_new, u_scale, g_scale, psi_scale, harmonic, g0 * g_scale, steps)


# --------------------------------------------------------------------------- dyadic fits


def halton_ball(dim, count, radius=1.0, center=None, seed=0):
    """At least ``count`` scrambled Halton points in B_radius(center), deterministic in ``seed``."""
    center = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    sampler = qmc.Halton(d=dim, scramble=True, seed=seed)
    # the ball fills pi/4 (2-D) or pi/6 (3-D) of the cube
    raw = 2.0 * sampler.random(int(count * (2.0 if dim == 2 else 2.5)) + 16) - 1.0
    raw = raw[np.linalg.norm(raw, axis=-1) < 1.0]
    while raw.shape[0] < count:
        more = 2.0 * sampler.random(count) - 1.0
        raw = np.concatenate([raw, more[np.linalg.norm(more, axis=-1) < 1.0]])
    return center + radius * raw


def side_samples(gamma, dim, count, radius, center, seed):
    """Quasi-random points of B_radius(center) split by side, with at least ``count`` per side."""
    total = 2 * count
    for _ in range(12):
        pts = halton_ball(dim, total, radius, center, seed)
        h = gamma.signed_height(pts)
        above, below = pts[h > 0], pts[h < 0]
        if above.shape[0] >= count and below.shape[0] >= count:
            return above, below
        total *= 2
    return above, below


@dataclass
class RegularityFit:
    lam: float
    depth: int
    center: np.ndarray
    P: List[LinearPolynomial]
    Q: List[LinearPolynomial]
    res1: np.ndarray
    res2: np.ndarray
    tangential_mismatch: np.ndarray
    jump_error: np.ndarray
    g0: float
    split: bool = True
    field_scale: float = 1.0
    notes: List[str] = field(default_factory=list)

    @property
    def res(self):
        return np.maximum(self.res1, self.res2) if self.split else self.res1

    @property
    def jumps(self):
        return np.array([p.normal_slope - q.normal_slope for p, q in zip(self.P, self.Q)])

    def rows(self):
        """One dict per scale, with the CSV columns k, res1, res2, a_i, b_k, c_i and diagnostics."""
        out = []
        for k in range(len(self.P)):
            row = {"k": k + 1, "res1": float(self.res1[k]), "res2": float(self.res2[k])}
            for i, a in enumerate(self.P[k].A, 1):
                row[f"a_{i}"] = float(a)
            row["b_k"] = self.P[k].B
            for i, c in enumerate(self.Q[k].A, 1):
                row[f"c_{i}"] = float(c)
            row["tangential_mismatch"] = float(self.tangential_mismatch[k])
            row["jump_error"] = float(self.jump_error[k])
            out.append(row)
        return out


def fit_polynomials(u, gamma: InterfaceGraph, lam=0.5, depth=8, samples=200, g0=None, center=None,
                    split=True, seed=0, degree=2):
    """Linear polynomials fitted on B_{lam^k}(center), k = 1..depth.

    ``degree=2`` takes each P_k as the linear part of a local quadratic fit,
    which estimates the one-sided Taylor polynomial without the O(lam^k)
    curvature bias of ``degree=1`` (a plain linear least-squares fit).  With ``split`` the two sides of the interface get separate polynomials P_k
    (above) and Q_k (below); without it one polynomial covers the ball and Q_k
    repeats P_k.  Residuals are sup norms over the fitting samples.  The
    diagnostics are |grad' P_k - grad' Q_k| and |(P_k - Q_k)_{x_n} - g(0)|.
    Every scale uses the same quasi-random pattern shrunk to its radius, so a
    self-similar field produces exactly self-similar fits.  Scales below the
    resolvable radius are dropped with a warning.
    """
    if not 0.0 < lam < 0.5 + 1e-15:
        raise PreconditionError("lambda must lie in (0, 1/2]")
    if degree not in (1, 2):
        raise PreconditionError("degree must be 1 or 2")
    fitter = LinearPolynomial.fit if degree == 1 else LinearPolynomial.fit_linear_part
    dim = gamma.dim
    need = dim + 1 if degree == 1 else dim + 1 + dim * (dim + 1) // 2
    center = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    if abs(float(gamma.signed_height(center))) > 1e-12:
        raise PreconditionError("the fitting center must lie on the interface")
    if g0 is None:
        g0 = _origin_value(u.density, gamma) if getattr(u, "density", None) is not None else 1.0
    notes = []
    usable = int(np.floor(np.log(RESOLVABLE_RADIUS) / np.log(lam)))
    if depth > usable:
        msg = f"depth {depth} truncated to {usable}: lam^k would fall below {RESOLVABLE_RADIUS:g}"
        warnings.warn(msg)
        notes.append(msg)
        depth = usable
    P, Q, r1, r2, tm, je = [], [], [], [], [], []
    scale = 0.0
    for k in range(1, depth + 1):
        rad = lam**k
        if split:
            above, below = side_samples(gamma, dim, samples, rad, center, seed)
            if min(above.shape[0], below.shape[0]) < need:
                msg = f"scale {k}: one side has too few samples; stopping"
                warnings.warn(msg)
                notes.append(msg)
                break
            ua, ub = u(above), u(below)
            p = fitter(above, ua, center)
            q = fitter(below, ub, center)
            r1.append(float(np.max(np.abs(ua - p(above)))))
            r2.append(float(np.max(np.abs(ub - q(below)))))
            scale = max(scale, float(np.max(np.abs(ua))), float(np.max(np.abs(ub))))
        else:
            pts = halton_ball(dim, 2 * samples, rad, center, seed)
            up = u(pts)
            p = q = fitter(pts, up, center)
            r1.append(float(np.max(np.abs(up - p(pts)))))
            r2.append(r1[-1])
            scale = max(scale, float(np.max(np.abs(up))))
        P.append(p)
        Q.append(q)
        tm.append(float(np.linalg.norm(p.tangential - q.tangential)))
        je.append(abs(p.normal_slope - q.normal_slope - g0))
    return RegularityFit(lam, len(P), center, P, Q, np.array(r1), np.array(r2), np.array(tm), np.array(je),
                         float(g0), split, scale, notes)


@dataclass(frozen=True)
class ExponentEstimate:
    alpha: float
    band: tuple
    slope: float
    stderr: float
    scales: np.ndarray
    saturated: bool


def estimate_exponent(res, lam, scale=1.0, min_scales=4):
    """Exponent alpha from residuals res_k ~ lam^(k(1+alpha)), k = 1, 2, ...

    The slope s of log res_k against k log(lam) is a least-squares fit over
    the scales above 100 eps * scale; alpha = s - 1 clamped to [0, 1] and the
    band is s - 1 +/- 2 standard errors, clamped likewise.
    """
    res = np.asarray(res, dtype=float)
    k = np.arange(1, res.size + 1)
    floor = 100.0 * np.finfo(float).eps * max(float(scale), np.finfo(float).tiny)
    keep = res > floor
    if keep.sum() < min_scales:
        raise InsufficientDataError(f"{int(keep.sum())} usable scales; at least {min_scales} are needed")
    x = k[keep] * np.log(lam)
    y = np.log(res[keep])
    coef, cov = np.polyfit(x, y, 1, cov="unscaled")
    fitted = np.polyval(coef, x)
    dof = max(1, x.size - 2)
    sigma2 = float(np.sum((y - fitted) ** 2)) / dof
    stderr = float(np.sqrt(max(cov[0, 0] * sigma2, 0.0)))
    s = float(coef[0])
    raw = s - 1.0
    band = (float(np.clip(raw - 2 * stderr, 0.0, 1.0)), float(np.clip(raw + 2 * stderr, 0.0, 1.0)))
    return ExponentEstimate(float(np.clip(raw, 0.0, 1.0)), band, s, stderr, k[keep], raw >= 1.0)


@dataclass(frozen=True)
class CauchyCheck:
    constant: float
    ratios: np.ndarray
    fitted_on: int
    passed: bool


def coefficient_increments(fit: RegularityFit):
    """lam^k |A_{k+1} - A_k| + lam^k |C_{k+1} - C_k| + |B_{k+1} - B_k| for k = 1..depth-1."""
    out = []
    for k in range(len(fit.P) - 1):
        lk = fit.lam ** (k + 1)
        dA = np.linalg.norm(fit.P[k + 1].A - fit.P[k].A)
        dC = np.linalg.norm(fit.Q[k + 1].A - fit.Q[k].A)
        dB = abs(fit.P[k + 1].B - fit.P[k].B)
        out.append(lk * dA + lk * dC + dB)
    return np.array(out)


def cauchy_check(fit: RegularityFit, alpha, fit_fraction=0.5):
    """Fit c on the leading scales, then test increments <= c lam^(k(1+alpha)) on the rest.

    The comparison allows only floating-point rounding (relative 1e-9).
    """
    inc = coefficient_increments(fit)
    k = np.arange(1, inc.size + 1)
    ratios = inc / fit.lam ** (k * (1.0 + alpha))
    m = max(1, int(np.ceil(fit_fraction * inc.size)))
    c = float(np.max(ratios[:m]))
    return CauchyCheck(c, ratios, m, bool(np.all(ratios[m:] <= c * (1.0 + 1e-9))))


# --------------------------------------------------------------------------- seminorms


@dataclass(frozen=True)
class PairPlan:
    """Point pairs (x_i, y_i) over which difference quotients are maximised."""

    x: np.ndarray
    y: np.ndarray

    @classmethod
    def all_pairs(cls, pts):
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        i, j = np.triu_indices(pts.shape[0], 1)
        return cls(pts[i], pts[j])

    @classmethod
    def at_separations(cls, centers, directions, separations):
        """Pairs c -/+ (s/2) e for every center c, unit direction e and separation s."""
        centers = np.atleast_2d(np.asarray(centers, dtype=float))
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
        directions = directions / np.linalg.norm(directions, axis=-1, keepdims=True)
        xs, ys = [], []
        for s in np.atleast_1d(separations):
            for e in directions:
                xs.append(centers - 0.5 * s * e)
                ys.append(centers + 0.5 * s * e)
        return cls(np.concatenate(xs), np.concatenate(ys))

    def __len__(self):
        return self.x.shape[0]


def difference_quotients(f, plan: PairPlan, mode="holder", beta=1.0):
    """Per-pair quotients |f(x) - f(y)| / w(|x - y|) with w = s^beta or s |log s|."""
    if len(plan) == 0:
        raise PreconditionError("the pair plan is empty")
    s = np.linalg.norm(plan.x - plan.y, axis=-1)
    if np.any(s <= 0):
        raise PreconditionError("pair plan contains coincident points")
    diff = np.abs(np.asarray(f(plan.x), dtype=float) - np.asarray(f(plan.y), dtype=float))
    if mode == "holder":
        if not 0.0 < beta <= 1.0:
            raise PreconditionError("Holder exponent must lie in (0, 1]")
        return diff / s**beta
    if mode == "loglip":
        if np.any(s >= 1.0):
            raise PreconditionError("LogLip quotients need separations below 1")
        return diff / (s * np.abs(np.log(s)))
    raise PreconditionError(f"unknown seminorm mode {mode!r}")


def seminorm(f, plan: PairPlan, mode="holder", beta=1.0):
    """Largest difference quotient over the plan: a lower bound for the true seminorm."""
    return float(np.max(difference_quotients(f, plan, mode, beta)))


# --------------------------------------------------------------------------- Campanato assembly


@dataclass(frozen=True)
class CampanatoEstimate:
    c_star: float
    coefficient_sup: float
    interior_c_star: float
    boundary_c_star: float

    @property
    def norm(self):
        return self.c_star + self.coefficient_sup


def _gradient(u, pts, h=1e-6):
    if hasattr(u, "gradient"):
        return np.asarray(u.gradient(pts), dtype=float)
    n = pts.shape[-1]
    return np.stack([(u(pts + h * e) - u(pts - h * e)) / (2 * h) for e in np.eye(n)], -1)


def _sphere_directions(dim, count=16):
    if dim == 2:
        t = 2.0 * np.pi * np.arange(count) / count
        return np.stack([np.cos(t), np.sin(t)], -1)
    pts = halton_ball(3, 4 * count, seed=7)
    pts = pts[np.linalg.norm(pts, axis=-1) > 0.2]
    return pts / np.linalg.norm(pts, axis=-1, keepdims=True)


def campanato_assemble(u, interior_points, boundary_fits, alpha, distance=None, gamma=None):
    """C^{1,alpha} surrogate from per-point linear fits.

    Interior points z get the Taylor polynomial u(z) + grad u(z).(x - z),
    tested on B_{d_z/2}(z) where d_z is the distance to the interface and to
    the unit sphere (``distance`` overrides it).  Boundary points contribute
    their dyadic fits: res_k / lam^(k(1+alpha)).  The estimate is
    C* + sup over all fits of |A| + |B|.
    """
    if not boundary_fits:
        raise PreconditionError("campanato assembly needs at least one boundary fit")
    z = np.atleast_2d(np.asarray(interior_points, dtype=float))
    dim = z.shape[-1]
    if distance is not None:
        d = np.asarray(distance(z), dtype=float)
    else:
        d = 1.0 - np.linalg.norm(z, axis=-1)
        if gamma is not None:
            d = np.minimum(d, gamma.vertical_distance_estimate(z))
    keep = d > 0
    z, d = z[keep], d[keep]
    uz = np.asarray(u(z), dtype=float)
    gz = _gradient(u, z)
    dirs = _sphere_directions(dim)
    fracs = np.array([0.25, 0.5, 0.75, 1.0])
    c_int = 0.0
    coef = 0.0
    for i in range(z.shape[0]):
        r = 0.5 * d[i] * fracs
        off = (r[:, None, None] * dirs[None]).reshape(-1, dim)
        pts = z[i] + off
        taylor = uz[i] + off @ gz[i]
        dist = np.linalg.norm(off, axis=-1)
        c_int = max(c_int, float(np.max(np.abs(u(pts) - taylor) / dist ** (1.0 + alpha))))
        coef = max(coef, float(np.sum(np.abs(gz[i])) + abs(uz[i] - gz[i] @ z[i])))
    c_bd = 0.0
    for fit in boundary_fits:
        k = np.arange(1, fit.depth + 1)
        c_bd = max(c_bd, float(np.max(fit.res / fit.lam ** (k * (1.0 + alpha)))))
        for p in list(fit.P) + list(fit.Q):
            coef = max(coef, p.size())
    return CampanatoEstimate(max(c_int, c_bd), coef, c_int, c_bd)


def run_regularity(family="flat", dim=2, lam=0.5, depth=8, samples=200, delta0=0.05, alpha=0.5,
                   density=1.0, seed=0, order=64, degree=2, **family_params):
    """Solve, normalise and fit at the origin; returns (normalized problem, fit, exponent)."""
    gamma = make_test_interface(family, dim, **family_params)
    g = as_density(density)
    u = single_layer_solve(gamma, g, order)
    norm = normalize(u, g, gamma, delta0, alpha)
    split = not norm.harmonic_path
    fit = fit_polynomials(norm.u, norm.gamma, lam, depth, samples, g0=norm.g0, split=split, seed=seed,
                          degree=degree)
    est = estimate_exponent(fit.res, lam, fit.field_scale)
    return norm, fit, est
