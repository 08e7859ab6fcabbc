import pytest

from cli import parse_args, parse_fuzz_args, parse_run_args, to_run_config
from config import (
    DEFAULT_DIMS,
    RunConfig,
    build_run_config,
    parse_config_text,
    parse_dims,
    render_config_text,
)
from quantum.errors import ConfigError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("INTERFEROMETRY_SEED", "INTERFEROMETRY_WORKERS", "INTERFEROMETRY_FORMAT"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.delenv("INTERFEROMETRY_TOL_KERNEL", raising=False)


def test_parse_config_text():
    text = "# comment\nscenario = serial_c\n\neta1 = 0.5  # trailing\nweight_i=0.25\n"
    assert parse_config_text(text) == {"scenario": "serial_c", "eta1": "0.5", "weight_i": "0.25"}


@pytest.mark.parametrize("text", ["no equals sign\n", "= value\n", "a = 1\na = 2\n"])
def test_malformed_config_text(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_dims():
    assert parse_dims("2..8") == (2, 8)
    assert parse_dims("5") == (5, 5)
    for bad in ("1..4", "2..33", "8..2", "x"):
        with pytest.raises(ConfigError):
            parse_dims(bad)


def test_flags_override_file_values():
    file_values = {"scenario": "serial_c", "seed": "3", "eta1": "0.5", "trials": "10"}
    config = build_run_config("run", {"seed": 9, "eta1": None}, file_values, env=False)
    assert config.seed == 9
    assert not config.seed_generated
    assert config.params == {"eta1": "0.5"}
    assert config.n_trials == 10


def test_environment_is_lowest_precedence(monkeypatch):
    monkeypatch.setenv("INTERFEROMETRY_SEED", "11")
    monkeypatch.setenv("INTERFEROMETRY_TOL_KERNEL", "1e-9")
    config = build_run_config("run", {"scenario": "coincidence_b"})
    assert config.seed == 11
    assert config.tolerances.kernel == 1e-9
    config = build_run_config("run", {"scenario": "coincidence_b"}, {"seed": "12"})
    assert config.seed == 12


def test_missing_seed_is_generated():
    config = build_run_config("run", {"scenario": "coincidence_b"}, env=False)
    assert config.seed_generated
    assert 0 <= config.seed < 2**64
    assert config.to_dict()["seed"] == config.seed


@pytest.mark.parametrize(
    "flags",
    [
        {"seed": -1},
        {"seed": 2**64},
        {"workers": 0},
        {"trials": -5},
        {"format": "xml"},
        {"tolerance": ["kernel"]},
        {"tolerance": ["bogus=1e-3"]},
        {"tolerance": ["kernel=-1"]},
    ],
)
def test_invalid_settings(flags):
    with pytest.raises(ConfigError):
        build_run_config("run", {"scenario": "coincidence_b", **flags}, env=False)


def test_run_needs_a_scenario():
    with pytest.raises(ConfigError):
        build_run_config("run", {}, env=False)


def test_config_file_round_trip(tmp_path):
    flags = {
        "scenario": "mach_zehnder_a",
        "seed": 5,
        "trials": 100,
        "tolerance": ["kernel=1e-9", "pos=2e-10"],
        "phase-steps": 16,
        "param": ["block=I"],
        "output": "out/report.json",
        "format": "csv",
        "workers": 2,
    }
    first = build_run_config("run", flags, env=False)
    path = tmp_path / "run.cfg"
    path.write_text(render_config_text(first.to_file_values()))
    second = to_run_config(parse_args(["run", "--config", str(path)]))
    assert second.to_dict() == {**first.to_dict(), "params": {"phase_steps": "16", "block": "I"}}
    third_values = parse_config_text(render_config_text(second.to_file_values()))
    assert build_run_config("run", {}, third_values, env=False) == second


def test_cli_parsers():
    config = parse_run_args(["--scenario", "serial_c", "--eta1", "0.5", "--seed", "1"])
    assert isinstance(config, RunConfig)
    assert config.params == {"eta1": 0.5}
    fuzz = parse_fuzz_args(["--trials", "0", "--seed", "1"])
    assert fuzz.mode == "fuzz"
    assert fuzz.dims == DEFAULT_DIMS
    assert fuzz.n_trials == 0
    with pytest.raises(SystemExit):
        parse_args(["run", "--format", "xml"])


def test_embedded_config_does_not_depend_on_output_path():
    flags = {"scenario": "serial_c", "seed": 3}
    a = build_run_config("run", {**flags, "output": "a.json"}, env=False)
    b = build_run_config("run", {**flags, "output": "b.json"}, env=False)
    assert "output" not in a.to_dict()
    assert a.to_dict() == b.to_dict()
