"""Run fingerprints for reproducible artifacts"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Optional


class RunVersioning:
    """Stable identifiers for a run's settings and inputs"""

    SCHEMA_VERSION = "1.0.0"

    @staticmethod
    def file_digest(path: Optional[Path]) -> Optional[str]:
        """sha256 of a file's bytes, so the fingerprint ignores where the input lives"""
        if path is None:
            return None
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()

    @staticmethod
    def fingerprint(settings: Dict[str, Any], inputs: Optional[Dict[str, Optional[Path]]] = None) -> str:
        """
        Hash of the normalized settings plus input file digests

        Args:
            settings: RunConfig.to_dict() output
            inputs: named input files

        Returns:
            First 16 hex digits of the sha256
        """
        components = {
            "schema_version": RunVersioning.SCHEMA_VERSION,
            "settings": settings,
            "inputs": {
                name: RunVersioning.file_digest(path)
                for name, path in sorted((inputs or {}).items())
            },
        }
        version_string = json.dumps(components, sort_keys=True)
        return hashlib.sha256(version_string.encode()).hexdigest()[:16]
