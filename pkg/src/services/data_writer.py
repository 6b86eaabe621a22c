"""Data writer service for JSON and CSV artifacts"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence

from src.core.logger import setup_logger
from src.models.report import to_jsonable
from src.utils.run_versioning import RunVersioning


class DataWriter:
    """Write run artifacts into one output directory

    Artifacts carry no timestamps and use sorted keys, so identical runs
    produce identical bytes.
    """

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)
        self.logger = setup_logger(self.__class__.__name__)
        self.files_written: List[str] = []

    def _path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name

    def write_json(self, name: str, data: Any) -> Path:
        """Write a JSON document (scalars as "p/q" strings)"""
        path = self._path(name)
        with path.open("w", encoding="utf-8", newline="\n") as f:
            json.dump(to_jsonable(data), f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write("\n")
        self._track(name)
        return path

    def write_csv(self, name: str, rows: Sequence[Sequence[str]]) -> Path:
        """Write CSV rows; the first row is the header"""
        path = self._path(name)
        with path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerows(rows)
        self._track(name)
        self.logger.debug(f"Wrote {len(rows) - 1} rows to {path}")
        return path

    def _track(self, name: str):
        if name not in self.files_written:
            self.files_written.append(name)

    def write_summary(self, fingerprint: str, command: str, checks: Dict[str, bool],
                      exit_code: int) -> Path:
        """summary.json: fingerprint, schema version, files written and per-check outcome"""
        summary = {
            "command": command,
            "fingerprint": fingerprint,
            "schema_version": RunVersioning.SCHEMA_VERSION,
            "files": sorted(self.files_written + ["summary.json"]),
            "checks": dict(sorted(checks.items())),
            "passed": all(checks.values()),
            "exit_code": exit_code,
        }
        path = self.write_json("summary.json", summary)
        self.logger.info(f"Summary written to {path}")
        return path


def read_csv(path: Path) -> List[Dict[str, str]]:
    """Rows of a CSV artifact as header-keyed dicts"""
    with Path(path).open("r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))
