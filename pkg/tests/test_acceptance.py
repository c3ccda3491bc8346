"""End-to-end acceptance criteria; each test prints one PASS/FAIL line with its measurements."""

import os
import time

import numpy as np
import pytest
import yaml

from test_geometry import inclusion_violations
from translab.averaging import AveragedField, ball_average, laplacian_match
from translab.cli import main
from translab.flat import FlatSlab, flat_solve, normal_jump, reflection_check, rescaled_density, symmetric_grid
from translab.geometry import StabilityParams, make_test_interface
from translab.potential import DensityField, TestFunction, green_ball, single_layer_solve, verify_distributional
from translab.regularity import PairPlan, cauchy_check, difference_quotients, run_regularity
from translab.stability import loglog_slope, run_stability
from translab.volume import chord_rule


@pytest.fixture
def announce(capsys):
    def emit(number, title, passed, elapsed, limit, detail):
        ok = passed and elapsed < limit
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number} {title}: {detail}; "
                  f"{elapsed:.1f} s (limit {limit:g} s)")
        return ok

    return emit


def empirical_orders(values):
    """log2 of successive error ratios, skipping pairs already at the rounding floor."""
    v = np.asarray(values, dtype=float)
    return [float(np.log2(a / b)) for a, b in zip(v[:-1], v[1:]) if b > 1e-13]


def test_distributional_identity(announce):
    t0 = time.perf_counter()
    bumps = [TestFunction(np.array(c), 0.4) for c in ([0.0, 0.0], [0.3, 0.05], [-0.2, -0.1])]
    worst, orders = 0.0, []
    for gamma in (make_test_interface("flat", 2), make_test_interface("sinusoid", 2, amp=0.0099, freq=10.0)):
        u = single_layer_solve(gamma, 1.0)
        for phi in bumps:
            worst = max(worst, verify_distributional(u, gamma, 1.0, phi).residual)
            ladder = [verify_distributional(u, gamma, 1.0, phi, q).residual for q in (4, 8, 16)]
            orders += empirical_orders(ladder)
    elapsed = time.perf_counter() - t0
    passed = worst < 1e-4 and min(orders) >= 2.0
    assert announce(1, "distributional identity", passed, elapsed, 30,
                    f"max residual {worst:.2e} (< 1e-4), min order {min(orders):.2f} (>= 2)")


def test_green_kernel(announce):
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, (4000, 2))
    x = x[np.linalg.norm(x, axis=-1) < 0.999][:1000]
    y = rng.uniform(-1, 1, (4000, 2))
    y = y[np.linalg.norm(y, axis=-1) < 0.999][:1000]
    sym = float(np.max(np.abs(green_ball(x, y) - green_ball(y, x))))
    phi = rng.uniform(0, 2 * np.pi, 1000)
    sphere = np.stack([np.cos(phi), np.sin(phi)], -1)
    bnd = float(np.max(np.abs(green_ball(sphere, y))))
    orders = []
    for _ in range(20):
        xx = rng.uniform(-0.5, 0.5, 2)
        yy = xx + 0.3 * np.array([np.cos(rng.uniform(0, 2 * np.pi)), np.sin(rng.uniform(0, 2 * np.pi))])
        errs = []
        for h in (0.04, 0.02, 0.01):
            lap = sum(green_ball(xx + h * e, yy) + green_ball(xx - h * e, yy) for e in np.eye(2))
            errs.append(abs(lap - 4 * green_ball(xx, yy)) / h**2)
        orders += empirical_orders(errs)
    elapsed = time.perf_counter() - t0
    passed = sym < 1e-12 and bnd < 1e-10 and min(orders) >= 1.8
    assert announce(2, "Green kernel", passed, elapsed, 10,
                    f"symmetry {sym:.1e}, boundary {bnd:.1e}, min harmonicity order {min(orders):.2f}")


def test_mean_value_and_laplacian(announce):
    t0 = time.perf_counter()
    gamma = make_test_interface("sinusoid", 2, amp=0.0099, freq=10.0)
    u = single_layer_solve(gamma, 1.0)
    eps = 0.1
    rng = np.random.default_rng(1)
    pts = []
    while len(pts) < 1000:
        x = rng.uniform(-1, 1, 2)
        if np.linalg.norm(x) + eps < 0.99 and chord_rule(gamma, x, eps, 4)[0].shape[0] == 0:
            pts.append(x)
    pts = np.array(pts)
    mv = max(abs(ball_average(u, x, eps).value - v) for x, v in zip(pts, u(pts)))
    field = AveragedField(u, eps)
    res, fine = [], []
    # points whose +-2h stencil stays inside the band, where the averaged density is smooth
    for x1, off in ((0.0, 0.0), (0.2, 0.5 * eps), (-0.3, -0.5 * eps)):
        x = np.array([x1, float(gamma.height(np.array([[x1]]))[0]) + off])
        res.append(laplacian_match(field, x, 0.01).residual)
        fine.append(laplacian_match(field, x, 0.005).residual)
    elapsed = time.perf_counter() - t0
    passed = mv < 1e-6 and max(res) < 1e-3 and all(f < r for f, r in zip(fine, res))
    assert announce(3, "mean value and averaged Laplacian", passed, elapsed, 60,
                    f"mean-value error {mv:.1e} on {len(pts)} points, Laplacian residual "
                    f"{max(res):.2e} at h=0.01 -> {max(fine):.2e} at h=0.005")


def test_flat_structure(announce):
    t0 = time.perf_counter()
    slab = FlatSlab(0.6, 0.1, 2)
    details, ok = [], True
    for name, g in (("constant", DensityField.constant(1.0)), ("holder", DensityField.holder(1.0, 0.1, 0.6))):
        v = flat_solve(slab, g)
        asym = reflection_check(v, symmetric_grid(2, 33, 0.95 * slab.radius, slab.height), slab.height)
        worst = 0.0
        for xp in (0.0, 0.15, -0.3):
            x = np.array([xp, slab.height])
            jump, _ = normal_jump(v, x, 0.05 * slab.radius)
            worst = max(worst, abs(jump - float(g(x[None])[0])))
        ok &= asym < 1e-8 and worst < 1e-3
        details.append(f"{name}: asymmetry {asym:.1e}, jump error {worst:.1e}")
    g = DensityField.cosine(1.0, 0.2, 3.0)
    v = flat_solve(slab, g)
    w = single_layer_solve(make_test_interface("flat", 2), DensityField(rescaled_density(g, 0.6, 0.1)))
    xs = np.random.default_rng(2).uniform(-0.6, 0.6, (50, 2))
    xs = xs[np.linalg.norm(xs, axis=-1) < 0.95]
    scale_err = float(np.max(np.abs(v(0.6 * xs + [0.0, 0.1]) - w(xs))))
    _, e1 = v.evaluate(0.6 * xs + [0.0, 0.1], with_error=True)
    _, e2 = w.evaluate(xs, with_error=True)
    ok &= scale_err <= float(np.max(e1 + e2)) + 1e-12
    elapsed = time.perf_counter() - t0
    assert announce(4, "flat structure", ok, elapsed, 60,
                    "; ".join(details) + f"; rescaling error {scale_err:.1e}")


def test_inclusion_fuzz(announce):
    t0 = time.perf_counter()
    outer, inner = inclusion_violations(10_000, seed=11)
    elapsed = time.perf_counter() - t0
    assert announce(5, "inclusion-radius fuzzing", outer == 0 and inner == 0, elapsed, 10,
                    f"{outer} outer and {inner} inner violations in 10^4 configurations")


def test_stability_sweep(announce):
    t0 = time.perf_counter()
    eps = [0.2, 0.1, 0.05, 0.025]
    reps = [run_stability(StabilityParams(e, e, e, 0.5)) for e in eps]
    gaps = [r.gap for r in reps]
    slope = loglog_slope(eps, gaps)
    decreasing = all(b < a for a, b in zip(gaps[:-1], gaps[1:]))
    eta_err = max(abs(abs(r.eta) - StabilityParams(e, e, e).eta_abs_expanded(2)) for r, e in zip(reps, eps))
    example = StabilityParams(theta=0.1, eps=0.1, delta=0.05).eta(2)
    elapsed = time.perf_counter() - t0
    passed = decreasing and 0.25 <= slope <= 1.25 and eta_err < 1e-12 and abs(example - 0.169861) < 1e-6
    assert announce(6, "stability sweep", passed, elapsed, 600,
                    f"gaps {', '.join(f'{g:.4g}' for g in gaps)} (decreasing: {decreasing}), "
                    f"slope {slope:.4f} (in [0.25, 1.25]), eta error {eta_err:.1e}, eta example {example:.6f}")


def test_regularity(announce):
    t0 = time.perf_counter()
    _, flat_fit, flat_est = run_regularity("flat", lam=0.5, depth=8, samples=200)
    _, cusp_fit, cusp_est = run_regularity("cusp", lam=0.5, depth=8, samples=200, c=0.01, alpha0=0.5)
    cc = cauchy_check(cusp_fit, cusp_est.alpha)
    jump = float(np.max(flat_fit.jump_error))
    elapsed = time.perf_counter() - t0
    passed = jump <= 0.05 and flat_est.saturated and flat_est.alpha == 1.0 and cusp_est.alpha >= 0.35 and cc.passed
    assert announce(7, "regularity fits", passed, elapsed, 600,
                    f"flat: max |jump - 1| {jump:.3f}, alpha {flat_est.alpha:.3f} (saturated {flat_est.saturated}); "
                    f"cusp: alpha {cusp_est.alpha:.3f} band [{cusp_est.band[0]:.3f}, {cusp_est.band[1]:.3f}], "
                    f"Cauchy constant {cc.constant:.3g} holds on held-out scales: {cc.passed}")


def test_sign_and_loglip(announce):
    t0 = time.perf_counter()
    gamma = make_test_interface("sinusoid", 2, amp=0.0099, freq=10.0)
    u = single_layer_solve(gamma, DensityField.holder(0.5, 1.0, 0.6))
    t = np.linspace(-1, 1, 128)
    X, Y = np.meshgrid(t, t, indexing="ij")
    grid = np.stack([X.ravel(), Y.ravel()], -1)
    grid = grid[np.linalg.norm(grid, axis=-1) <= 1.0]
    umax = float(np.max(u(grid)))
    # the step density makes the log term in the modulus visible at the jump point
    flat = make_test_interface("flat", 2)
    w = single_layer_solve(flat, DensityField.step(0.5, 1.5))
    seps = np.logspace(-2, -4, 9)
    centers = np.array([[0.0, 0.0], [0.0, 0.05], [0.1, 0.0]])
    dirs = np.array([[1.0, 0.0], [0.0, 1.0], [np.sqrt(0.5), np.sqrt(0.5)]])
    per_sep = [float(np.max(difference_quotients(w, PairPlan.at_separations(centers, dirs, [s]), "loglip")))
               for s in seps]
    spread = (max(per_sep) - min(per_sep)) / max(per_sep)
    elapsed = time.perf_counter() - t0
    passed = umax <= 1e-10 and spread < 0.5
    assert announce(8, "sign and LogLip modulus", passed, elapsed, 60,
                    f"max u {umax:.2e} on the 128^2 grid, LogLip quotient {min(per_sep):.4f}..{max(per_sep):.4f} "
                    f"(variation {spread:.1%})")


CONFIGS = {
    "solve": {"interface": {"family": "sinusoid", "amp": 0.01, "freq": 5.0}, "grid": 17},
    "flat": {"density": {"kind": "holder", "base": 1.0, "amp": 0.1, "beta": 0.6},
             "options": {"points_per_line": 9}},
    "stability-sweep": {"options": {"sweep": [0.2, 0.1, 0.05]}},
    "regularity-fit": {"interface": {"family": "cusp", "c": 0.01, "alpha0": 0.5}, "seed": 4},
    "verify": {"options": {"mean_value_points": 20, "laplacian_points": 1, "eps_ladder": [0.1, 0.05]}},
}


def test_determinism(tmp_path, announce):
    t0 = time.perf_counter()
    same = {}
    for command, body in CONFIGS.items():
        path = tmp_path / f"{command}.yaml"
        path.write_text(yaml.safe_dump({"command": command, **body}))
        outs = []
        for run, threads in enumerate((1, 3)):
            out = tmp_path / f"{command}-{run}"
            assert main([command, "--config", str(path), "--out", str(out), "--threads", str(threads)]) == 0
            outs.append({f: (out / f).read_bytes() for f in sorted(os.listdir(out))})
        same[command] = outs[0] == outs[1]
    elapsed = time.perf_counter() - t0
    assert announce(9, "determinism", all(same.values()), elapsed, float("inf"),
                    ", ".join(f"{c}: {'identical' if s else 'DIFFERENT'}" for c, s in same.items()))
