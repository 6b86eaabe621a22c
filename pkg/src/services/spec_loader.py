"""Spec loader service for JSON/YAML construction inputs"""

from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml

from src.core.errors import InvalidSpec
from src.core.logger import setup_logger
from src.models.mapping import CounterexampleOptions
from src.models.vectors import DualFunctional, FamilyKind, FamilySpec
from src.services.sequence_spaces import canonical_probe, decreasing_probe
from src.utils.scalars import RATIONAL, ScalarBackend

NAMED_PROBES = {
    "canonical": canonical_probe,
    "decreasing": decreasing_probe,
}


def parse_probe(value: Any, backend: ScalarBackend = RATIONAL) -> DualFunctional:
    """A named probe, an inline JSON/YAML mapping, or an already parsed mapping"""
    if isinstance(value, str):
        name = value.strip().lower()
        if name in NAMED_PROBES:
            return NAMED_PROBES[name](backend)
        try:
            value = yaml.safe_load(value)
        except yaml.YAMLError as e:
            raise InvalidSpec(f"Cannot parse probe {value!r}: {e}") from e
        if isinstance(value, str):
            raise InvalidSpec(f"Unknown probe {value!r}; use {', '.join(NAMED_PROBES)} or a mapping")
    return DualFunctional.from_dict(value, backend)


def parse_family(value: Any, depth: int, backend: ScalarBackend = RATIONAL) -> FamilySpec:
    """A family kind name ("c0-partial-sums", ...) or a family mapping"""
    if isinstance(value, str):
        return FamilySpec(FamilyKind.parse(value), depth)
    if isinstance(value, dict):
        data = dict(value)
        data.setdefault("depth", depth)
        return FamilySpec.from_dict(data, backend)
    raise InvalidSpec(f"Family must be a name or a mapping, got {type(value).__name__}")


class SpecLoader:
    """Load construction inputs and saved plans from JSON or YAML files"""

    def __init__(self, spec_file: Path):
        self.spec_file = Path(spec_file)
        self.logger = setup_logger(self.__class__.__name__)

    def load(self) -> Dict[str, Any]:
        """Read the file as a mapping

        Returns:
            Parsed document
        """
        self.logger.debug(f"Loading spec from {self.spec_file}")

        if not self.spec_file.exists():
            raise FileNotFoundError(f"Spec file not found: {self.spec_file}")

        try:
            with open(self.spec_file, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise InvalidSpec(f"Cannot parse {self.spec_file}: {e}") from e

        if not isinstance(data, dict):
            raise InvalidSpec(f"{self.spec_file} must contain a mapping at the top level")
        return data

    def load_counterexample(self, depth: int, backend: ScalarBackend = RATIONAL,
                            overrides: Optional[Dict[str, Any]] = None,
                            defaults: Optional[Dict[str, Any]] = None
                            ) -> Tuple[FamilySpec, DualFunctional, CounterexampleOptions]:
        """{"family": ..., "probe": ..., "options": {...}}

        Precedence: overrides, then the file's options, then defaults.
        """
        data = self.load()
        options_data = {k: v for k, v in (defaults or {}).items() if v is not None}
        options_data.update(data.get("options") or {})
        options_data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        options_data.setdefault("depth", depth)
        family = parse_family(data.get("family", "c0-partial-sums"), int(options_data["depth"]), backend)
        probe = parse_probe(data.get("probe", "canonical"), backend)
        options = CounterexampleOptions.from_dict(options_data, backend)
        self.logger.info(f"Loaded {family.kind.value} counterexample input from {self.spec_file}")
        return family, probe, options
