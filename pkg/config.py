import os
import secrets
from collections.abc import Mapping
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Literal

from dotenv import load_dotenv

from quantum.errors import ConfigError
from quantum.hilbert import DEFAULT_TOLERANCES, MAX_DIM, Tolerances

load_dotenv()

Mode = Literal["run", "fuzz"]
FORMATS = ("json", "csv")
SEED_BITS = 64
DEFAULT_DIMS = (2, 8)
DEFAULT_FUZZ_TRIALS = 100
DEFAULT_SAMPLES = 256
TOLERANCE_ENV_PREFIX = "INTERFEROMETRY_TOL_"

# Config-file keys that are not scenario parameters. Everything else is.
SETTING_KEYS = (
    "scenario",
    "trials",
    "seed",
    "dims",
    "tolerance",
    "output",
    "format",
    "workers",
    "samples",
    "replay",
)
# Flags that are shorthands for scenario parameters.
PARAM_FLAGS = {"phase-steps": "phase_steps", "eta1": "eta1", "eta2": "eta2"}


def get_default_seed() -> str | None:
    return os.getenv("INTERFEROMETRY_SEED")


def get_default_workers() -> str:
    return os.getenv("INTERFEROMETRY_WORKERS", "1")


def get_default_format() -> str:
    return os.getenv("INTERFEROMETRY_FORMAT", "json")


def get_log_level() -> str:
    return os.getenv("INTERFEROMETRY_LOG_LEVEL", "WARNING").upper()


def get_tolerance_overrides() -> dict[str, str]:
    """INTERFEROMETRY_TOL_KERNEL=1e-9 becomes {"kernel": "1e-9"}."""
    return {
        key.removeprefix(TOLERANCE_ENV_PREFIX).lower(): value
        for key, value in os.environ.items()
        if key.startswith(TOLERANCE_ENV_PREFIX)
    }


@dataclass(frozen=True)
class RunConfig:
    mode: Mode
    scenario: str | None = None
    params: dict[str, Any] = field(default_factory=dict)
    n_trials: int | None = None
    seed: int = 0
    seed_generated: bool = False
    dims: tuple[int, int] = DEFAULT_DIMS
    tolerances: Tolerances = DEFAULT_TOLERANCES
    output: str | None = None
    output_format: str = "json"
    workers: int = 1
    samples: int = DEFAULT_SAMPLES
    inject_indefinite: bool = False
    replay: str | None = None

    def to_dict(self) -> dict[str, Any]:
        """The fully resolved config, as embedded in reports; the output path is left out."""
        return {
            "mode": self.mode,
            "scenario": self.scenario,
            "params": dict(self.params),
            "n_trials": self.n_trials,
            "seed": self.seed,
            "seed_generated": self.seed_generated,
            "dims": list(self.dims),
            "tolerances": self.tolerances.to_dict(),
            "format": self.output_format,
            "workers": self.workers,
            "samples": self.samples,
            "inject_indefinite": self.inject_indefinite,
            "replay": self.replay,
        }

    def to_file_values(self) -> dict[str, str]:
        """Flat key = value entries that load back into an equal config."""
        values = {
            "seed": str(self.seed),
            "dims": f"{self.dims[0]}..{self.dims[1]}",
            "format": self.output_format,
            "workers": str(self.workers),
            "samples": str(self.samples),
        }
        if self.scenario is not None:
            values["scenario"] = self.scenario
        if self.n_trials is not None:
            values["trials"] = str(self.n_trials)
        if self.output is not None:
            values["output"] = self.output
        if self.replay is not None:
            values["replay"] = self.replay
        changed = {
            f.name: getattr(self.tolerances, f.name)
            for f in fields(self.tolerances)
            if getattr(self.tolerances, f.name) != getattr(DEFAULT_TOLERANCES, f.name)
        }
        if changed:
            values["tolerance"] = ", ".join(f"{k}={v!r}" for k, v in changed.items())
        for key, value in self.params.items():
            values[key] = repr(value) if isinstance(value, float) else str(value)
        return values


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Flat `key = value` lines; blank lines and `#` comments are skipped."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key '{key}'")
        values[key] = value
    return values


def render_config_text(values: Mapping[str, str]) -> str:
    return "".join(f"{key} = {value}\n" for key, value in values.items())


def load_config_file(path: str | Path) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    return parse_config_text(text, str(path))


def parse_dims(text: str) -> tuple[int, int]:
    """'2..8' or a single '4'; both ends inside [2, MAX_DIM]."""
    low, sep, high = str(text).partition("..")
    try:
        lo = int(low)
        hi = int(high) if sep else lo
    except ValueError:
        raise ConfigError(f"dims must look like '2..8', got {text!r}") from None
    if not 2 <= lo <= hi <= MAX_DIM:
        raise ConfigError(f"dims must satisfy 2 <= low <= high <= {MAX_DIM}, got {text!r}")
    return lo, hi


def parse_tolerances(entries: list[str], base: Tolerances = DEFAULT_TOLERANCES) -> Tolerances:
    """Entries like 'kernel=1e-9'; one entry may carry several, comma separated."""
    overrides: dict[str, float] = {}
    for entry in entries:
        for item in filter(None, (s.strip() for s in entry.split(","))):
            name, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"Tolerance must be name=value, got {item!r}")
            overrides[name.strip()] = _as_float(f"tolerance {name.strip()}", value)
    try:
        return base.with_overrides(overrides)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def parse_param_entries(entries: list[str]) -> dict[str, str]:
    params = {}
    for entry in entries:
        key, sep, value = entry.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--param must be KEY=VALUE, got {entry!r}")
        params[key.strip()] = value.strip()
    return params


def _as_int(name: str, value: Any, low: int | None = None) -> int:
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be an integer, got {value!r}") from None
    if low is not None and number < low:
        raise ConfigError(f"{name} must be >= {low}, got {number}")
    return number


def _as_float(name: str, value: Any) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None


def _as_seed(value: Any) -> int:
    seed = _as_int("seed", value, low=0)
    if seed >= 1 << SEED_BITS:
        raise ConfigError(f"seed must fit in {SEED_BITS} bits, got {seed}")
    return seed


def build_run_config(
    mode: Mode,
    flags: Mapping[str, Any],
    file_values: Mapping[str, str] | None = None,
    env: bool = True,
) -> RunConfig:
    """
    Merge settings with precedence defaults < environment < config file < flags.

    `flags` uses config-file key names; unset flags are None or absent.
    """
    settings: dict[str, Any] = {}
    tolerance_entries: list[str] = []
    params: dict[str, Any] = {}

    if env:
        settings["workers"] = get_default_workers()
        settings["format"] = get_default_format()
        if (seed := get_default_seed()) is not None:
            settings["seed"] = seed
        tolerance_entries += [f"{k}={v}" for k, v in get_tolerance_overrides().items()]

    for key, value in (file_values or {}).items():
        if key == "tolerance":
            tolerance_entries.append(value)
        elif key in SETTING_KEYS:
            settings[key] = value
        else:
            params[PARAM_FLAGS.get(key, key)] = value

    for key, value in flags.items():
        if value is None:
            continue
        if key == "tolerance":
            tolerance_entries += list(value)
        elif key == "param":
            params.update(parse_param_entries(list(value)))
        elif key in PARAM_FLAGS:
            params[PARAM_FLAGS[key]] = value
        elif key == "inject_indefinite":
            settings[key] = bool(value)
        else:
            settings[key] = value

    scenario = settings.get("scenario")
    if mode == "run" and not scenario:
        raise ConfigError("run needs a scenario (--scenario or 'scenario' in the config file)")
    if mode == "fuzz" and params:
        raise ConfigError(f"fuzz takes no scenario parameters, got {sorted(params)}")

    output_format = str(settings.get("format", "json")).lower()
    if output_format not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}, got {output_format!r}")

    if "seed" in settings:
        seed, generated = _as_seed(settings["seed"]), False
    else:
        seed, generated = secrets.randbits(SEED_BITS), True

    n_trials = settings.get("trials")
    if n_trials is not None:
        n_trials = _as_int("trials", n_trials, low=0)
    elif mode == "fuzz":
        n_trials = DEFAULT_FUZZ_TRIALS

    return RunConfig(
        mode=mode,
        scenario=scenario if mode == "run" else None,
        params=params,
        n_trials=n_trials,
        seed=seed,
        seed_generated=generated,
        dims=parse_dims(settings["dims"]) if "dims" in settings else DEFAULT_DIMS,
        tolerances=parse_tolerances(tolerance_entries),
        output=settings.get("output"),
        output_format=output_format,
        workers=_as_int("workers", settings.get("workers", 1), low=1),
        samples=_as_int("samples", settings.get("samples", DEFAULT_SAMPLES), low=1),
        inject_indefinite=bool(settings.get("inject_indefinite", False)),
        replay=settings.get("replay") if mode == "fuzz" else None,
    )
