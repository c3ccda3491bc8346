"""Experiment configuration: YAML files validated into an ExperimentConfig.

Grammar (YAML mapping; unknown keys are rejected)::

    command: solve | flat | stability-sweep | regularity-fit | verify
    dim: 2                      # 2 or 3
    seed: 0
    interface: {family: sinusoid, amp: 0.01, freq: 10}
    density: {kind: constant, c: 1.0}    # constant | holder | cosine | step
    quadrature: {surface_order: 64, volume_order: 32}
    grid: 128
    ladder_t0: 0.05
    options: {...}              # command-specific, see DEFAULT_OPTIONS

For ``flat`` the profile ``lines`` are tangential positions as fractions of the
slab radius, so x' = t * radius for each t in (-1, 1).
"""

import copy
from dataclasses import dataclass, field

import yaml

from .errors import ConfigError, PreconditionError
from .geometry import FAMILIES, StabilityParams, make_test_interface
from .potential import DensityField

COMMANDS = ("solve", "flat", "stability-sweep", "regularity-fit", "verify")

DEFAULT_OPTIONS = {
    "solve": {"plane": 0.0},
    "flat": {"radius": 1.0, "height": 0.0, "lines": [0.0, 0.25, 0.5], "points_per_line": 101},
    "stability-sweep": {"gamma": 0.5, "sweep": [0.2, 0.1, 0.05, 0.025], "triples": None, "grid": 64,
                        "family": "sinusoid"},
    "regularity-fit": {"lam": 0.5, "depth": 8, "samples": 200, "delta0": 0.05, "alpha": 0.5, "degree": 2},
    "verify": {"eps": 0.1, "h": 0.01, "mean_value_points": 200, "laplacian_points": 3,
               "eps_ladder": [0.1, 0.05, 0.025], "tolerance": 1e-6, "laplacian_tolerance": 1e-3},
}

DENSITY_KINDS = {
    "constant": DensityField.constant,
    "holder": DensityField.holder,
    "cosine": DensityField.cosine,
    "step": DensityField.step,
}

TOP_KEYS = {"command", "dim", "seed", "interface", "density", "quadrature", "grid", "ladder_t0", "options"}


@dataclass
class ExperimentConfig:
    command: str
    dim: int = 2
    seed: int = 0
    interface: dict = field(default_factory=lambda: {"family": "flat"})
    density: dict = field(default_factory=lambda: {"kind": "constant", "c": 1.0})
    surface_order: int = 64
    volume_order: int = 32
    grid: int = 128
    ladder_t0: float = 0.05
    options: dict = field(default_factory=dict)

    def echo(self):
        """Everything that determines the outputs (thread count and output paths excluded)."""
        return {
            "command": self.command,
            "dim": self.dim,
            "seed": self.seed,
            "interface": self.interface,
            "density": self.density,
            "quadrature": {"surface_order": self.surface_order, "volume_order": self.volume_order},
            "grid": self.grid,
            "ladder_t0": self.ladder_t0,
            "options": self.options,
        }

    def build_interface(self):
        spec = dict(self.interface)
        family = spec.pop("family", "flat")
        return make_test_interface(family, self.dim, **spec)

    def build_density(self):
        spec = dict(self.density)
        kind = spec.pop("kind", "constant")
        if kind not in DENSITY_KINDS:
            raise ConfigError(f"unknown density kind {kind!r}; expected one of {tuple(DENSITY_KINDS)}")
        try:
            return DENSITY_KINDS[kind](**spec)
        except TypeError as exc:
            raise ConfigError(f"bad parameters for density {kind!r}: {exc}") from None


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def from_dict(data, command=None):
    """Validate a parsed mapping; ``command`` (e.g. from the CLI) must agree with the file if both are given."""
    if data is None:
        data = {}
    _require(isinstance(data, dict), "configuration must be a mapping")
    unknown = set(data) - TOP_KEYS
    _require(not unknown, f"unknown configuration keys: {sorted(unknown)}")
    cmd = data.get("command", command)
    _require(cmd is not None, "no command given")
    _require(cmd in COMMANDS, f"unknown command {cmd!r}; expected one of {COMMANDS}")
    _require(command is None or command == cmd, f"command {command!r} does not match config command {cmd!r}")
    quad = data.get("quadrature", {}) or {}
    _require(isinstance(quad, dict), "quadrature must be a mapping")
    _require(not set(quad) - {"surface_order", "volume_order"}, f"unknown quadrature keys: {sorted(quad)}")
    opts = copy.deepcopy(DEFAULT_OPTIONS[cmd])
    given = data.get("options", {}) or {}
    _require(isinstance(given, dict), "options must be a mapping")
    unknown = set(given) - set(opts)
    _require(not unknown, f"unknown options for {cmd}: {sorted(unknown)}")
    opts.update(given)
    cfg = ExperimentConfig(
        command=cmd,
        dim=data.get("dim", 2),
        seed=data.get("seed", 0),
        interface=dict(data.get("interface", {"family": "flat"}) or {"family": "flat"}),
        density=dict(data.get("density", {"kind": "constant", "c": 1.0}) or {}),
        surface_order=quad.get("surface_order", 64),
        volume_order=quad.get("volume_order", 32),
        grid=data.get("grid", 128),
        ladder_t0=data.get("ladder_t0", 0.05),
        options=opts,
    )
    validate(cfg)
    return cfg


def load_config(path, command=None):
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from None
    return from_dict(data, command)


def validate(cfg: ExperimentConfig):
    """Check every precondition that can be decided from the configuration alone."""
    _require(cfg.dim in (2, 3), f"dim must be 2 or 3, got {cfg.dim}")
    _require(isinstance(cfg.seed, int) and cfg.seed >= 0, "seed must be a non-negative integer")
    for name in ("surface_order", "volume_order", "grid"):
        val = getattr(cfg, name)
        _require(isinstance(val, int) and val >= 2, f"{name} must be an integer >= 2")
    _require(cfg.ladder_t0 > 0, "ladder_t0 must be positive")
    family = cfg.interface.get("family", "flat")
    _require(family in FAMILIES and family != "custom", f"interface family {family!r} is not configurable")
    cfg.build_interface()
    cfg.build_density()
    o = cfg.options
    if cfg.command == "flat":
        _require(o["radius"] > 0, "flat radius must be positive")
        _require(abs(o["height"]) < o["radius"], "flat height must satisfy |a| < r")
        _require(all(abs(t) < 1 for t in o["lines"]), "profile lines are fractions of the radius in (-1, 1)")
        _require(int(o["points_per_line"]) >= 3, "points_per_line must be at least 3")
    elif cfg.command == "stability-sweep":
        triples = o["triples"] if o["triples"] is not None else [[e, e, e] for e in o["sweep"]]
        _require(len(triples) > 0, "stability sweep is empty")
        for t in triples:
            _require(len(t) == 3, "each triple is [theta, delta, eps]")
            try:
                StabilityParams(theta=t[0], eps=t[2], delta=t[1], gamma=o["gamma"])
            except PreconditionError as exc:
                raise ConfigError(f"triple {t}: {exc}") from None
        _require(o["grid"] >= 64, "stability grid needs at least 64 points per axis")
        _require(o["family"] in ("sinusoid", "flat"), "stability family must be sinusoid or flat")
    elif cfg.command == "regularity-fit":
        _require(0 < o["lam"] <= 0.5, "lam must lie in (0, 1/2]")
        _require(isinstance(o["depth"], int) and o["depth"] >= 4, "depth must be an integer >= 4")
        _require(isinstance(o["samples"], int) and o["samples"] >= 10, "samples must be an integer >= 10")
        _require(o["delta0"] > 0, "delta0 must be positive")
        _require(0 < o["alpha"] < 1, "alpha must lie in (0, 1)")
        _require(o["degree"] in (1, 2), "degree must be 1 (linear fits) or 2 (linear part of quadratic fits)")
    elif cfg.command == "verify":
        _require(0 < o["eps"] < 0.5, "eps must lie in (0, 1/2)")
        _require(0 < o["h"] < o["eps"], "h must lie in (0, eps)")
        _require(all(0 < e < 0.5 for e in o["eps_ladder"]), "eps_ladder entries must lie in (0, 1/2)")
    return cfg
