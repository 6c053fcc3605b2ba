"""Flat ``KEY=value`` configuration files merged with flags and environment."""
import logging
import os
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple

from dotenv import dotenv_values
from pydantic import ValidationError

from junction.errors import ConfigError
from junction.models.config_models import RunConfig, SweepSpec

logger = logging.getLogger(__name__)

ENV_OUTPUT_DIR = "JUNCTION_OUTPUT_DIR"
ENV_LOG_LEVEL = "JUNCTION_LOG_LEVEL"
SWEEP_KEYS = ("nu", "tau_plus", "c0", "delta_j")


def read_config_file(path: Optional[Path]) -> Dict[str, str]:
    if path is None:
        return {}
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    values: Dict[str, str] = {}
    for key, value in dotenv_values(path).items():
        if value is None:
            raise ConfigError(f"config key {key!r} in {path} has no value")
        values[key.strip().lower()] = value
    logger.debug("read %d keys from %s", len(values), path)
    return values


def environment_defaults() -> Dict[str, str]:
    defaults = {}
    if os.getenv(ENV_OUTPUT_DIR):
        defaults["out"] = os.getenv(ENV_OUTPUT_DIR)
    if os.getenv(ENV_LOG_LEVEL):
        defaults["log_level"] = os.getenv(ENV_LOG_LEVEL)
    return defaults


def _describe(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        where = ".".join(str(part) for part in error["loc"]) or "config"
        parts.append(f"{where}: {error['msg']}")
    return "; ".join(parts)


def _merge(file_values: Mapping[str, str], overrides: Mapping[str, object]) -> Dict[str, object]:
    merged: Dict[str, object] = dict(environment_defaults())
    merged.update(file_values)
    merged.update({key: value for key, value in overrides.items() if value is not None})
    return merged


def build_run_config(command: str, file_values: Mapping[str, str],
                     overrides: Mapping[str, object]) -> RunConfig:
    """Precedence: flags, then the config file, then the environment, then defaults."""
    merged = _merge(file_values, overrides)
    merged["command"] = command
    try:
        return RunConfig(**merged)
    except ValidationError as exc:
        raise ConfigError(_describe(exc)) from exc


def build_sweep(file_values: Mapping[str, str],
                overrides: Mapping[str, object]) -> Tuple[RunConfig, SweepSpec]:
    merged = _merge(file_values, overrides)
    if "j" in merged:
        raise ConfigError("sweeps take delta_j lists; j is not accepted")
    sweep_values = {key: merged.pop(key) for key in SWEEP_KEYS if key in merged}
    merged["command"] = "sweep"
    try:
        config = RunConfig(**merged)
        spec = SweepSpec(**sweep_values, jobs=config.jobs)
    except ValidationError as exc:
        raise ConfigError(_describe(exc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return config, spec
