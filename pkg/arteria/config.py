"""Run configuration files, presets and flag merging.

A configuration file is a flat YAML mapping of the run settings::

    # baseline, stricter tolerances
    nu: 1.0
    amp: 0.1
    rtol: 1.0e-10

Settings are merged in the order defaults, preset, file, command-line flags;
later sources win and unset flags (``None``) never override.  The merged
mapping is validated as a whole and every problem names its key.
"""

from __future__ import annotations

import math
import os
import tempfile
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal

import click
import yaml

from arteria.grid import MIN_POINTS
from arteria.types import (
    DEFAULT_SNAPSHOTS,
    DEFAULT_SOBOLEV_INDEX,
    ExperimentSpec,
    ModelParams,
    ParameterError,
    RhsVariant,
    SolverConfig,
)

CONFIG_ENV = "ARTERIA_CONFIG"

FLOAT_KEYS: tuple[str, ...] = (
    "nu", "eps", "kappa", "beta", "amp", "t_final", "rtol", "atol",
    "dt_init", "dt_min", "sample_dt", "s_index", "mollify",
)
INT_KEYS: tuple[str, ...] = ("n", "max_steps", "snapshots")
OPTIONAL_KEYS: tuple[str, ...] = ("dt_init", "dt_min", "sample_dt")
KNOWN_KEYS: tuple[str, ...] = (*FLOAT_KEYS, *INT_KEYS, "dealias", "variant", "label")

# command-line spelling -> RhsVariant tag
VARIANT_NAMES: dict[str, str] = {"general": "general", "bbm": "bbm_local", "mollified": "mollified"}

PRESETS: dict[str, dict[str, Any]] = {
    "baseline": {},
    "large-amplitude": {"amp": 5.0},
    "bbm-beta-2": {"nu": 0.0, "beta": 2.0},
    "bbm-beta-0": {"nu": 0.0, "beta": 0.0},
    "bbm-beta-minus-1": {"nu": 0.0, "beta": -1.0},
    "bbm-extended": {"nu": 0.0, "beta": -1.0, "t_final": 20.0},
}


class ConfigError(ValueError):
    """A configuration error with a stable machine-readable code."""

    def __init__(self, message: str, *, code: str = "config.invalid") -> None:
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class ConfigIssue:
    """A config validation issue."""

    code: str
    severity: Literal["error", "warn"]
    message: str
    path: str | None = None


def starter_config() -> dict[str, Any]:
    """Return the default settings as a fresh mapping."""
    return {
        "nu": 1.0,
        "eps": 1.0,
        "kappa": 1.0,
        "beta": 1.0,
        "amp": 0.1,
        "n": 1024,
        "t_final": 10.0,
        "rtol": 1e-8,
        "atol": 1e-8,
        "dt_init": None,
        "dt_min": None,
        "max_steps": 200_000,
        "sample_dt": None,
        "s_index": DEFAULT_SOBOLEV_INDEX,
        "dealias": True,
        "mollify": 0.0,
        "variant": "general",
        "snapshots": DEFAULT_SNAPSHOTS,
        "label": "run",
    }


def resolve_config_path(config: str | Path | None = None) -> tuple[Path, str]:
    """Resolve config path using CLI, environment, then Click defaults."""
    if config is not None:
        return Path(config).expanduser(), "option"
    env_path = os.environ.get(CONFIG_ENV)
    if env_path:
        return Path(env_path).expanduser(), "environment"
    return Path(click.get_app_dir("arteria", roaming=False)) / "config.yaml", "default"


def load_raw_config(path: str | Path) -> dict[str, Any]:
    """Load a raw mapping, returning an empty mapping for a missing file."""
    config_path = Path(path)
    if not config_path.exists():
        return {}
    try:
        loaded = yaml.safe_load(config_path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"Unable to read config: {exc}", code="config.yaml_invalid") from exc
    if loaded is None:
        return {}
    if not isinstance(loaded, dict):
        raise ConfigError("Config root must be a mapping", code="config.root_not_mapping")
    return dict(loaded)


# ═══════════════════════════════════════════════════════════════════════════
# Validation
# ═══════════════════════════════════════════════════════════════════════════


def _number(value: Any) -> float | None:
    """Coerce ints, floats and numeric strings (YAML reads ``1e-8`` as text)."""
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value.strip())
        except ValueError:
            return None
    return None


def _integer(value: Any) -> int | None:
    number = _number(value)
    if number is None or not math.isfinite(number) or number != int(number):
        return None
    return int(number)


def _switch(value: Any) -> bool | None:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in ("on", "off", "true", "false"):
        return value.strip().lower() in ("on", "true")
    return None


def _error(issues: list[ConfigIssue], code: str, message: str, key: str) -> None:
    issues.append(ConfigIssue(code, "error", message, key))


def validate_config(raw: Mapping[str, Any]) -> list[ConfigIssue]:  # noqa: C901
    """Report every problem of a settings mapping without raising."""
    issues: list[ConfigIssue] = []
    for key in raw:
        if key not in KNOWN_KEYS:
            _error(issues, "config.unknown_key", f"Unknown config key: {key}", str(key))

    numbers: dict[str, float] = {}
    for key in FLOAT_KEYS:
        if key not in raw or (raw[key] is None and key in OPTIONAL_KEYS):
            continue
        number = _number(raw[key])
        if number is None or not math.isfinite(number):
            _error(issues, "config.value_invalid", f"{key} must be a finite number", key)
            continue
        numbers[key] = number
    for key in INT_KEYS:
        if key not in raw:
            continue
        integer = _integer(raw[key])
        if integer is None:
            _error(issues, "config.value_invalid", f"{key} must be an integer", key)
            continue
        numbers[key] = integer

    if numbers.get("kappa", 1.0) <= 0:
        _error(
            issues,
            "config.kappa_unsupported",
            "kappa must be positive; the frictionless limit kappa = 0 is an idealized case "
            "that is not supported",
            "kappa",
        )
    if numbers.get("nu", 0.0) < 0:
        _error(issues, "config.value_invalid", "nu must be non-negative", "nu")
    for key in ("eps", "t_final", "rtol", "atol", "dt_init", "dt_min", "sample_dt", "s_index"):
        if key in numbers and numbers[key] <= 0:
            _error(issues, "config.value_invalid", f"{key} must be positive", key)
    if numbers.get("mollify", 0.0) < 0:
        _error(issues, "config.value_invalid", "mollify must be non-negative", "mollify")
    if "n" in numbers and (numbers["n"] < MIN_POINTS or int(numbers["n"]) % 2):
        _error(
            issues, "config.value_invalid", f"n must be even and at least {MIN_POINTS}", "n"
        )
    if numbers.get("max_steps", 1) < 1:
        _error(issues, "config.value_invalid", "max_steps must be at least 1", "max_steps")
    if numbers.get("snapshots", 2) < 2:
        _error(issues, "config.value_invalid", "snapshots must be at least 2", "snapshots")

    if "dealias" in raw and _switch(raw["dealias"]) is None:
        _error(issues, "config.value_invalid", "dealias must be on or off", "dealias")
    if "label" in raw and (not isinstance(raw["label"], str) or not raw["label"].strip()):
        _error(issues, "config.value_invalid", "label must be a non-empty string", "label")

    variant = raw.get("variant", "general")
    if not isinstance(variant, str) or (
        variant not in VARIANT_NAMES and variant not in VARIANT_NAMES.values()
    ):
        _error(
            issues,
            "config.variant_unknown",
            f"variant must be one of {', '.join(VARIANT_NAMES)}",
            "variant",
        )
    else:
        tag = VARIANT_NAMES.get(variant, variant)
        mollify = numbers.get("mollify", 0.0)
        if tag == "bbm_local" and numbers.get("nu", 1.0) != 0:
            _error(issues, "config.variant_invalid", "variant bbm requires nu = 0", "variant")
        if tag == "mollified" and mollify <= 0:
            _error(
                issues, "config.variant_invalid", "variant mollified requires mollify > 0", "mollify"
            )
        if tag != "mollified" and mollify > 0:
            _error(
                issues,
                "config.variant_invalid",
                "mollify is only meaningful with variant mollified",
                "mollify",
            )
    return issues


def _raise_errors(issues: list[ConfigIssue]) -> None:
    errors = [issue for issue in issues if issue.severity == "error"]
    if errors:
        message = "; ".join(issue.message for issue in errors)
        raise ConfigError(message, code=errors[0].code)


# ═══════════════════════════════════════════════════════════════════════════
# Normalization
# ═══════════════════════════════════════════════════════════════════════════


def normalize_config(raw: Mapping[str, Any]) -> ExperimentSpec:
    """Build the frozen :class:`ExperimentSpec` from a validated mapping."""
    source = {**starter_config(), **raw}

    def optional(key: str) -> float | None:
        return None if source[key] is None else _number(source[key])

    try:
        params = ModelParams(
            nu=_number(source["nu"]),  # type: ignore[arg-type]
            eps=_number(source["eps"]),  # type: ignore[arg-type]
            kappa=_number(source["kappa"]),  # type: ignore[arg-type]
            beta=_number(source["beta"]),  # type: ignore[arg-type]
        )
        solver = SolverConfig(
            rtol=_number(source["rtol"]),  # type: ignore[arg-type]
            atol=_number(source["atol"]),  # type: ignore[arg-type]
            t_final=_number(source["t_final"]),  # type: ignore[arg-type]
            dt_init=optional("dt_init"),
            dt_min=optional("dt_min"),
            max_steps=_integer(source["max_steps"]),  # type: ignore[arg-type]
            sample_dt=optional("sample_dt"),
        )
        tag = VARIANT_NAMES.get(source["variant"], source["variant"])
        variant = RhsVariant(tag, _number(source["mollify"]) or 0.0)
        return ExperimentSpec(
            params=params,
            amplitude=_number(source["amp"]),  # type: ignore[arg-type]
            grid_n=_integer(source["n"]),  # type: ignore[arg-type]
            solver=solver,
            variant=variant,
            label=str(source["label"]),
            sobolev_index=_number(source["s_index"]),  # type: ignore[arg-type]
            dealias=bool(_switch(source["dealias"])),
            snapshots=_integer(source["snapshots"]),  # type: ignore[arg-type]
        )
    except ParameterError as exc:
        raise ConfigError(str(exc), code=exc.code.replace("params.", "config.", 1)) from exc


def parse_config(
    path: str | Path | None = None,
    overrides: Mapping[str, Any] | None = None,
    *,
    preset: str | None = None,
    required: bool = False,
) -> ExperimentSpec:
    """Merge defaults, *preset*, the file at *path* and *overrides* into a spec.

    With ``required=True`` a missing file is an error rather than empty.
    """
    merged = starter_config()
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(
                f"Unknown preset: {preset} (choose from {', '.join(PRESETS)})",
                code="config.preset_unknown",
            )
        merged.update(PRESETS[preset])
    if path is not None:
        if required and not Path(path).exists():
            raise ConfigError(f"Config file not found: {path}", code="config.file_missing")
        merged.update(load_raw_config(path))
    merged.update({key: value for key, value in (overrides or {}).items() if value is not None})
    _raise_errors(validate_config(merged))
    return normalize_config(merged)


def spec_to_mapping(spec: ExperimentSpec) -> dict[str, Any]:
    """The effective flat settings of *spec*; ``parse_config`` inverts it."""
    names = {tag: name for name, tag in VARIANT_NAMES.items()}
    return {
        "nu": spec.params.nu,
        "eps": spec.params.eps,
        "kappa": spec.params.kappa,
        "beta": spec.params.beta,
        "amp": spec.amplitude,
        "n": spec.grid_n,
        "t_final": spec.solver.t_final,
        "rtol": spec.solver.rtol,
        "atol": spec.solver.atol,
        "dt_init": spec.solver.dt_init,
        "dt_min": spec.solver.dt_min,
        "max_steps": spec.solver.max_steps,
        "sample_dt": spec.solver.sample_dt,
        "s_index": spec.sobolev_index,
        "dealias": spec.dealias,
        "mollify": spec.variant.mollify,
        "variant": names[spec.variant.tag],
        "snapshots": spec.snapshots,
        "label": spec.label,
    }


def atomic_save_config(path: str | Path, data: Mapping[str, Any]) -> None:
    """Write config atomically, preserving an existing file mode."""
    config_path = Path(path)
    config_path.parent.mkdir(parents=True, exist_ok=True)
    mode = config_path.stat().st_mode if config_path.exists() else None
    content = yaml.safe_dump(dict(data), default_flow_style=False, sort_keys=False)
    temporary_name: str | None = None
    try:
        with tempfile.NamedTemporaryFile(
            "w", encoding="utf-8", newline="\n", dir=config_path.parent, delete=False
        ) as handle:
            temporary_name = handle.name
            handle.write(content)
            handle.flush()
            os.fsync(handle.fileno())
        if mode is not None:
            os.chmod(temporary_name, mode)
        os.replace(temporary_name, config_path)
    except OSError as exc:
        if temporary_name:
            try:
                os.unlink(temporary_name)
            except OSError:
                pass
        raise ConfigError(f"Unable to write config: {exc}", code="config.write_failed") from exc


__all__ = [
    "CONFIG_ENV",
    "KNOWN_KEYS",
    "PRESETS",
    "VARIANT_NAMES",
    "ConfigError",
    "ConfigIssue",
    "atomic_save_config",
    "load_raw_config",
    "normalize_config",
    "parse_config",
    "resolve_config_path",
    "spec_to_mapping",
    "starter_config",
    "validate_config",
]
