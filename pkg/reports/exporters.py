"""
Artifact writers

CSV tables and JSON documents of the pipeline steps, plus the run manifest.
Outputs are byte-stable: fixed float format, "\\n" line endings, sorted JSON
keys, no wall-clock timestamps. Files written by a failed run are removed.
"""

import hashlib
import json
import math
from datetime import date, datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from core.models import StepResult, TweetRecord
from data.tweet_loader import write_records


FLOAT_FORMAT = "%.6f"
MANIFEST_NAME = "manifest.json"


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; NaN/inf floats become None, dates ISO strings."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set)):
        items = sorted(value) if isinstance(value, set) else value
        return [to_jsonable(v) for v in items]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return None if math.isnan(value) or math.isinf(value) else value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (datetime, date, pd.Timestamp)):
        return value.isoformat()
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    return value


class ArtifactWriter:
    """
    Writes step results under one output directory and keeps track of them.

    Usage:
        writer = ArtifactWriter('output')
        writer.write_result('engagement', result)
        writer.write_manifest(config, inputs)
    """

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.artifacts: List[Dict[str, Any]] = []
        self.written: List[Path] = []

    def _register(self, step: str, path: Path, kind: str, rows: Optional[int]):
        self.written.append(path)
        self.artifacts.append({
            "step": step,
            "file": path.name,
            "kind": kind,
            "rows": rows,
            "sha256": sha256_file(path),
        })

    def write_table(self, step: str, name: str, frame: pd.DataFrame) -> Path:
        path = self.out_dir / f"{name}.csv"
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
        self._register(step, path, "csv", int(len(frame)))
        return path

    def write_document(self, step: str, name: str, document: Dict[str, Any]) -> Path:
        path = self.out_dir / f"{name}.json"
        payload = json.dumps(to_jsonable(document), sort_keys=True, indent=2, ensure_ascii=False)
        path.write_text(payload + "\n", encoding="utf-8", newline="\n")
        self._register(step, path, "json", None)
        return path

    def write_records(self, step: str, name: str, records: List[TweetRecord]) -> Path:
        path = self.out_dir / f"{name}.ndjson"
        rows = write_records(records, path)
        self._register(step, path, "ndjson", rows)
        return path

    def write_result(self, step: str, result: StepResult) -> List[Path]:
        paths = [self.write_table(step, name, frame) for name, frame in sorted(result.tables.items())]
        paths += [self.write_document(step, name, doc) for name, doc in sorted(result.documents.items())]
        paths += [self.write_records(step, name, records) for name, records in sorted(result.records.items())]
        return paths

    def write_manifest(self, config_hash: str, seeds: Dict[str, Any], inputs: Iterable[Path],
                       counters: Dict[str, Any], reconciliation: Dict[str, Any],
                       steps: List[str]) -> Path:
        """
        manifest.json: config hash, seeds, input digests, artifacts with row
        counts and digests, ingest counters and the reconciliation block.
        """
        manifest = {
            "config_hash": config_hash,
            "seeds": seeds,
            "steps": steps,
            "inputs": [{"file": Path(p).name, "sha256": sha256_file(p)} for p in inputs],
            "artifacts": sorted(self.artifacts, key=lambda a: a["file"]),
            "ingest_counters": counters,
            "reconciliation": reconciliation,
        }
        path = self.out_dir / MANIFEST_NAME
        payload = json.dumps(to_jsonable(manifest), sort_keys=True, indent=2, ensure_ascii=False)
        path.write_text(payload + "\n", encoding="utf-8", newline="\n")
        self.written.append(path)
        return path

    def cleanup(self) -> int:
        """Remove everything written so far; returns the number of files removed."""
        removed = 0
        for path in self.written:
            if path.exists():
                path.unlink()
                removed += 1
        self.written.clear()
        self.artifacts.clear()
        return removed
