"""
Result store for experiment outputs.

Every file lives inside the declared output directory. CSV files start with a
versioned schema comment and carry no timestamps; file names carry a hash of
the canonical parameter JSON.
"""

import csv
import hashlib
import json
import logging
import platform
from datetime import datetime, timezone
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import scipy
from pydantic import BaseModel

from src.config.settings import settings
from src.utils.errors import ConfigurationError


def to_jsonable(value: Any) -> Any:
    """Plain JSON value for numpy scalars, fractions, mpmath numbers, enums and models."""
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set)):
        items = sorted(value) if isinstance(value, set) else value
        return [to_jsonable(v) for v in items]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (Fraction, Path)):
        return str(value)
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    # mpmath numbers and anything else with a faithful text form
    return str(value)


def canonical_json(value: Any) -> str:
    return json.dumps(to_jsonable(value), sort_keys=True, separators=(",", ":"))


def param_hash(params: Dict[str, Any], length: int = 12) -> str:
    """SHA-256 prefix of the canonical parameter JSON."""
    return hashlib.sha256(canonical_json(params).encode()).hexdigest()[:length]


def _cell(value: Any) -> Any:
    value = to_jsonable(value)
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else value


class ResultStore:
    """Owns one output directory: CSV tables, JSON summaries and the run manifest."""

    def __init__(self, directory: Optional[str] = None, version: Optional[str] = None):
        self.logger = logging.getLogger("result_store")
        self.directory = Path(directory or settings.output_dir)
        self.version = version or settings.app_version
        self.files: List[Path] = []

    def _path(self, name: str) -> Path:
        if Path(name).name != name or name.startswith("."):
            raise ConfigurationError(f"output name '{name}' leaves the output directory", field_path="output")
        self.directory.mkdir(parents=True, exist_ok=True)
        return self.directory / name

    def header(self, schema: str) -> str:
        return f"# {settings.app_name} v{self.version} schema={schema}"

    def write_csv(self, schema: str, rows: Sequence[Dict[str, Any]], params: Dict[str, Any]) -> Path:
        """One versioned CSV table; columns in order of first appearance."""
        path = self._path(f"{schema}-{param_hash(params)}.csv")
        columns: List[str] = []
        for row in rows:
            columns.extend(key for key in row if key not in columns)
        with path.open("w", newline="") as handle:
            handle.write(self.header(schema) + "\n")
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(row.get(key)) for key in columns])
        self.files.append(path)
        self.logger.debug(f"Wrote {len(rows)} rows to {path}")
        return path

    def write_json(self, name: str, payload: Dict[str, Any], params: Optional[Dict[str, Any]] = None) -> Path:
        stem = f"{name}-{param_hash(params)}" if params is not None else name
        path = self._path(f"{stem}.json")
        path.write_text(json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n")
        self.files.append(path)
        return path

    def write_response(self, response, params: Dict[str, Any], formats: Sequence[str] = ("csv", "json")
                       ) -> Dict[str, Path]:
        """CSV tables and JSON summary of one diagnostic response."""
        schema = response.schema_name or response.diagnostic or "diagnostic"
        written: Dict[str, Path] = {}
        if "csv" in formats and response.rows:
            written["rows"] = self.write_csv(schema, response.rows, params)
        if "csv" in formats:
            for table, rows in response.tables.items():
                written[table] = self.write_csv(table, rows, params)
        if "json" in formats:
            summary = {**response.summary(), "params": params, "schema": schema}
            # run-dependent fields stay out of the summary
            summary.pop("execution_time_ms", None)
            written["summary"] = self.write_json(f"{schema}_summary", summary, params)
        return written

    def write_manifest(self, config: Dict[str, Any], runs: List[Dict[str, Any]],
                       flagged: Optional[Dict[str, Any]] = None) -> Path:
        """Resolved config, code and library versions, flagged defaults and every written file."""
        manifest = {
            "name": settings.app_name,
            "version": self.version,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "config": config,
            "flagged_defaults": flagged or {},
            "runs": runs,
            "files": sorted(str(p.relative_to(self.directory)) for p in set(self.files)),
        }
        path = self._path("manifest.json")
        path.write_text(json.dumps(to_jsonable(manifest), indent=2, sort_keys=True) + "\n")
        self.logger.info(f"Manifest written to {path}")
        return path


def read_csv(path: Path) -> List[Dict[str, str]]:
    """Rows of a versioned CSV table (header comment skipped)."""
    with Path(path).open(newline="") as handle:
        handle.readline()
        return list(csv.DictReader(handle))
