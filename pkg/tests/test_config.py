import pytest
import yaml

from translab.config import DEFAULT_OPTIONS, from_dict, load_config
from translab.errors import ConfigError


def test_defaults_filled():
    cfg = from_dict({"command": "regularity-fit"})
    assert cfg.options == DEFAULT_OPTIONS["regularity-fit"]
    assert cfg.dim == 2 and cfg.seed == 0 and cfg.surface_order == 64


def test_echo_excludes_runtime_settings():
    echo = from_dict({"command": "solve", "seed": 3}).echo()
    assert echo["seed"] == 3
    assert "threads" not in echo and "out" not in echo


@pytest.mark.parametrize(
    "data",
    [
        {"command": "solve", "colour": "red"},
        {"command": "dance"},
        {"command": "solve", "dim": 4},
        {"command": "solve", "seed": -1},
        {"command": "solve", "interface": {"family": "spiral"}},
        {"command": "solve", "density": {"kind": "wavy"}},
        {"command": "solve", "density": {"kind": "constant", "k": 1}},
        {"command": "solve", "quadrature": {"surface_order": 1}},
        {"command": "solve", "options": {"nonsense": 1}},
        {"command": "flat", "options": {"height": 2.0}},
        {"command": "stability-sweep", "options": {"sweep": [0.6]}},
        {"command": "stability-sweep", "options": {"grid": 32}},
        {"command": "stability-sweep", "options": {"triples": [[0.1, 0.1]]}},
        {"command": "regularity-fit", "options": {"lam": 0.7}},
        {"command": "regularity-fit", "options": {"degree": 3}},
        {"command": "verify", "options": {"h": 0.2}},
        {},
        [1, 2],
    ],
)
def test_rejects_invalid(data):
    with pytest.raises(ConfigError):
        from_dict(data)


def test_command_mismatch():
    with pytest.raises(ConfigError):
        from_dict({"command": "solve"}, command="flat")
    assert from_dict({}, command="flat").command == "flat"


def test_load_config_roundtrip(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text(yaml.safe_dump({"command": "flat", "options": {"radius": 0.5}}))
    cfg = load_config(path, "flat")
    assert cfg.options["radius"] == 0.5
    assert cfg.build_interface().family == "flat"


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("command: [unclosed")
    with pytest.raises(ConfigError):
        load_config(bad)
