"""
Configuration management for tangency-lab.

This module handles loading configuration from environment variables,
including numerical tolerances, default truncation degrees and the
worker-pool size used by scenario runs.
"""

import logging
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, Optional

logger = logging.getLogger(__name__)

ENV_PREFIX = "TANGENCY_LAB_"


class LabConfig:
    """Configuration manager for tangency-lab settings."""

    def __init__(self) -> None:
        """Initialize configuration by loading from environment."""
        self._overrides: Dict[str, Any] = {}
        self._load_dotenv()
        self._validate_config()

    def _load_dotenv(self) -> None:
        """
        Load environment variables from .env file if it exists.

        System environment variables take precedence over .env file variables.
        """
        env_file = Path(".env")
        if env_file.exists():
            try:
                with open(env_file, "r") as f:
                    for line in f:
                        line = line.strip()
                        if line and not line.startswith("#") and "=" in line:
                            key, value = line.split("=", 1)
                            key = key.strip()
                            value = value.strip().strip('"').strip("'")
                            if key not in os.environ:
                                os.environ[key] = value
                logger.debug(f"Loaded configuration from {env_file}")
            except Exception as e:
                logger.warning(f"Failed to load .env file: {e}")
        else:
            logger.debug("No .env file found, using system environment variables only")

    def _validate_config(self) -> None:
        """Warn about tolerances that make the numerics meaningless."""
        tol = self.get_rel_tol()
        if tol >= 1e-4:
            logger.warning(
                f"Relative tolerance {tol:g} is very loose; "
                f"multiplicity and order detection will be unreliable."
            )

    def _read(self, name: str, cast: Any, default: Any) -> Any:
        if name in self._overrides:
            return self._overrides[name]
        raw = os.getenv(f"{ENV_PREFIX}{name}")
        if raw is None or raw == "":
            return default
        try:
            value = cast(raw)
        except ValueError:
            logger.warning(f"Invalid {ENV_PREFIX}{name} value: {raw}")
            return default
        return value

    def override(self, **values: Any) -> None:
        """
        Apply command-line overrides on top of the environment.

        Args:
            **values: Setting names (rel_tol, degree, threads, seed, ...) mapped
                to values; None entries are ignored.
        """
        for key, value in values.items():
            if value is not None:
                self._overrides[key.upper()] = value

    def reset_overrides(self) -> None:
        """Drop all command-line overrides."""
        self._overrides.clear()

    @contextmanager
    def scoped(self, **values: Any) -> Iterator["LabConfig"]:
        """Apply overrides for the duration of a block, then restore the previous ones."""
        saved = dict(self._overrides)
        self.override(**values)
        try:
            yield self
        finally:
            self._overrides = saved

    def get_rel_tol(self) -> float:
        """Relative tolerance applied against per-series magnitude scales."""
        tol = float(self._read("REL_TOL", float, 1e-10))
        if tol <= 0:
            logger.warning(f"Non-positive tolerance {tol}, falling back to 1e-10")
            return 1e-10
        return tol

    def get_degree(self) -> int:
        """Default truncation degree for germ computations."""
        return int(self._read("DEGREE", int, 12))

    def get_graph_degree(self) -> int:
        """Default polynomial degree for graphs in the bidisk."""
        return int(self._read("GRAPH_DEGREE", int, 32))

    def get_threads(self) -> int:
        """Size of the worker pool for scenario runs."""
        return max(1, int(self._read("THREADS", int, 4)))

    def get_seed(self) -> int:
        """Seed of the single random generator used by scans and suites."""
        return int(self._read("SEED", int, 20240601))

    def get_output_dir(self) -> Path:
        """Directory receiving artifacts when none is given on the command line."""
        return Path(self._read("OUT", str, "lab-output"))

    def get_log_level(self) -> str:
        """Get the logging level."""
        return str(self._read("LOG_LEVEL", str, "INFO")).upper()

    def is_debug_mode(self) -> bool:
        """Check if debug mode is enabled."""
        return os.getenv(f"{ENV_PREFIX}DEBUG_MODE", "false").lower() == "true"

    def summary(self, seed: Optional[int] = None) -> Dict[str, Any]:
        """
        Get the effective settings, as recorded in manifests and reports.

        Returns:
            Dictionary of setting names and values
        """
        return {
            "rel_tol": self.get_rel_tol(),
            "degree": self.get_degree(),
            "graph_degree": self.get_graph_degree(),
            "threads": self.get_threads(),
            "seed": self.get_seed() if seed is None else seed,
        }


# Global configuration instance
config = LabConfig()
