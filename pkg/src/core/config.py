"""Configuration management"""

import os
from pathlib import Path

from dotenv import load_dotenv

from src.core.errors import ConfigError, InvalidSpec
from src.utils.scalars import to_fraction


class Config:
    """Centralized configuration from WSC_FORGE_* environment variables"""

    def __init__(self):
        # Load environment variables
        load_dotenv()

        # Paths
        self.output_dir = Path(os.getenv("WSC_FORGE_OUT", "data"))

        # Arithmetic
        self.precision = os.getenv("WSC_FORGE_PRECISION", "rational").lower()
        if self.precision not in ("rational", "float64"):
            raise ConfigError(f"WSC_FORGE_PRECISION must be rational or float64, got {self.precision!r}")

        # Construction settings
        self.depth = self._int("WSC_FORGE_DEPTH", 8)
        if self.depth < 2:
            raise ConfigError(f"WSC_FORGE_DEPTH must be at least 2, got {self.depth}")
        self.target_z = self._scalar("WSC_FORGE_TARGET_Z", "1/2")
        self.max_family_depth = self._int("WSC_FORGE_MAX_FAMILY_DEPTH", 4096)
        self.float_depth_cap = self._int("WSC_FORGE_FLOAT_DEPTH_CAP", 24)

        # Verification settings
        self.seed = self._int("WSC_FORGE_SEED", 0)
        self.trials = self._int("WSC_FORGE_TRIALS", 1000)
        self.gap_floor = self._scalar("WSC_FORGE_GAP_FLOOR", "1")

        # Logging
        self.log_level = os.getenv("WSC_FORGE_LOG_LEVEL", "INFO")
        self.log_file = os.getenv("WSC_FORGE_LOG_FILE") or None

    @staticmethod
    def _int(name: str, default: int) -> int:
        raw = os.getenv(name)
        if raw is None or raw == "":
            return default
        try:
            return int(raw)
        except ValueError as e:
            raise ConfigError(f"{name} must be an integer, got {raw!r}") from e

    @staticmethod
    def _scalar(name: str, default: str) -> str:
        raw = os.getenv(name) or default
        try:
            to_fraction(raw)
        except InvalidSpec as e:
            raise ConfigError(f"{name}: {e}") from e
        return raw
