"""TOML loading and environment defaults."""

import logging
import os
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from common.errors import ConfigError

from .schema import ExperimentConfig, parse_config

logger = logging.getLogger(__name__)

VERSION = "0.1.0"
DEFAULT_OUTPUT = "./runs"


def load_config(path: Union[str, Path], seed: Optional[int] = None) -> ExperimentConfig:
    """Read and validate an experiment config.

    Args:
        path: TOML file.
        seed: Overrides ``solver.seed`` when given; the override is part of
            the hashed config.

    Raises:
        ConfigError: if the file is missing, is not TOML or fails validation.
    """
    path = Path(path)
    try:
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from e
    if seed is not None:
        raw.setdefault("solver", {})["seed"] = seed
    config = parse_config(raw)
    logger.debug("Loaded %s (hash %s)", path, config.config_hash[:12])
    return config


@dataclass
class Settings:
    """Process-level defaults read from the environment (and ``.env``)."""

    output_dir: str = DEFAULT_OUTPUT
    threads: int = 1

    @classmethod
    def from_env(cls) -> "Settings":
        threads = os.environ.get("SHELAB_THREADS")
        try:
            n = int(threads) if threads else (os.cpu_count() or 1)
        except ValueError as e:
            raise ConfigError(f"SHELAB_THREADS must be an integer, got {threads!r}") from e
        if n < 1:
            raise ConfigError("SHELAB_THREADS must be positive")
        return cls(os.environ.get("SHELAB_OUT", DEFAULT_OUTPUT), n)


def resolve_output(flag: Optional[str], config: ExperimentConfig, settings: Settings) -> str:
    """Output directory: flag, then config, then environment."""
    return flag or config.output_directory or settings.output_dir


def resolve_threads(flag: Optional[int], settings: Settings) -> int:
    if flag is not None:
        if flag < 1:
            raise ConfigError("--threads must be positive")
        return flag
    return settings.threads
