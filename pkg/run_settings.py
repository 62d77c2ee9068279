"""
Run settings that can be adjusted at runtime.

This module provides a RunSettings class to manage the defaults shared by
every command (seed, bandwidth factor, ensemble sizes, worker count) and the
environment-variable overrides layered on top of settings.py.
"""

import os
from typing import Any, Dict, Mapping, Optional

from errors import ConfigError
from settings import (
    DEFAULT_BANDWIDTH_FACTOR,
    DEFAULT_LOG_LEVEL,
    DEFAULT_PAIRS,
    DEFAULT_REPLICATES,
    DEFAULT_SEED,
    DEFAULT_SURROGATES,
    DEFAULT_WORKERS,
    ENV_LOG_LEVEL,
    ENV_SEED,
    ENV_WORKERS,
    SETTING_BOUNDS,
)

_INTEGER_SETTINGS = ('seed', 'surrogates', 'replicates', 'pairs', 'workers')


class RunSettings:
    """
    Manages run-wide defaults that commands fall back to when no flag is given.
    """

    def __init__(self) -> None:
        """Initialize run settings with default values."""
        self.seed: int = DEFAULT_SEED
        self.factor: float = DEFAULT_BANDWIDTH_FACTOR
        self.surrogates: int = DEFAULT_SURROGATES
        self.replicates: int = DEFAULT_REPLICATES
        self.pairs: int = DEFAULT_PAIRS
        self.workers: int = DEFAULT_WORKERS
        self.log_level: str = DEFAULT_LOG_LEVEL

    def adjust(self, name: str, value: Any) -> None:
        """
        Set one setting after validating it against SETTING_BOUNDS.

        Args:
            name: Setting name, one of the keys of SETTING_BOUNDS
            value: New value; integer settings must be whole numbers

        Raises:
            ConfigError: Unknown setting or value outside its bounds
        """
        if name not in SETTING_BOUNDS:
            raise ConfigError(f"unknown setting '{name}'")

        bounds = SETTING_BOUNDS[name]
        try:
            parsed = int(value) if name in _INTEGER_SETTINGS else float(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{name}: cannot parse {value!r}") from exc

        if name in _INTEGER_SETTINGS and float(value) != parsed:
            raise ConfigError(f"{name}: expected an integer, got {value!r}")
        if not bounds['min_value'] <= parsed <= bounds['max_value']:
            raise ConfigError(
                f"{name}={parsed} outside "
                f"[{bounds['min_value']}, {bounds['max_value']}]"
            )

        setattr(self, name, parsed)

    def refresh_from_env(self, environ: Optional[Mapping[str, str]] = None) -> None:
        """
        Apply DCMI_SEED, DCMI_WORKERS and DCMI_LOG_LEVEL when they are set.

        Args:
            environ: Mapping to read from; defaults to os.environ
        """
        environ = os.environ if environ is None else environ

        if environ.get(ENV_SEED, '').strip():
            self.adjust('seed', environ[ENV_SEED].strip())
        if environ.get(ENV_WORKERS, '').strip():
            self.adjust('workers', environ[ENV_WORKERS].strip())
        if environ.get(ENV_LOG_LEVEL, '').strip():
            self.log_level = environ[ENV_LOG_LEVEL].strip().upper()

    def get_settings_dict(self, overrides: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
        """
        Get the settings that shape a result as a dictionary.

        Workers are left out: results do not depend on them.

        Args:
            overrides: Values given on the command line; None entries are ignored

        Returns:
            Dict of seed, factor, surrogates, replicates and pairs
        """
        current = {
            'seed': self.seed,
            'factor': self.factor,
            'surrogates': self.surrogates,
            'replicates': self.replicates,
            'pairs': self.pairs,
        }
        for name, value in (overrides or {}).items():
            if name in current and value is not None:
                current[name] = value
        return current


# Global instance
run_settings = RunSettings()
