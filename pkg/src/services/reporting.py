"""Run outputs: per-experiment CSV tables, report.json, timing.json and a hashed MANIFEST."""

import hashlib
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Union

import pandas as pd

from ..models.scenario import RunReport

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
REPORT_NAME = "report.json"
TIMING_NAME = "timing.json"
MANIFEST_NAME = "MANIFEST"


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


class ReportWriter:
    """Writes into one output directory, remembering every file it produced."""

    def __init__(self, out_dir: Union[str, Path]):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.written: List[str] = []

    def write_frames(self, experiment_id: str, frames: Dict[str, pd.DataFrame]) -> List[str]:
        """Main table first as <id>.csv, then <id>-<key>.csv in key order."""
        names = []
        for key in sorted(frames, key=lambda k: (k != "", k)):
            name = f"{experiment_id}.csv" if key == "" else f"{experiment_id}-{key}.csv"
            frames[key].to_csv(self.out_dir / name, index=False, float_format=FLOAT_FORMAT)
            names.append(name)
        self.written.extend(names)
        return names

    def write_report(self, report: RunReport) -> Path:
        """Reproducible content only; wall clock and threads go to timing.json, outside the MANIFEST."""
        path = self.out_dir / REPORT_NAME
        path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
        self.written.append(REPORT_NAME)
        (self.out_dir / TIMING_NAME).write_text(json.dumps(report.timing(), indent=2), encoding="utf-8")
        return path

    def write_manifest(self, names: Iterable[str] = ()) -> Path:
        """One "<sha256>  <name>" line per output, sorted by name."""
        listed = sorted(set(names) | set(self.written))
        lines = [f"{sha256_file(self.out_dir / name)}  {name}" for name in listed if (self.out_dir / name).is_file()]
        path = self.out_dir / MANIFEST_NAME
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        logger.info(f"Wrote {len(lines)} outputs to {self.out_dir}")
        return path


def read_manifest(path: Union[str, Path]) -> Dict[str, str]:
    """Map output name -> sha256 from a MANIFEST file."""
    entries = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            digest, name = line.split("  ", 1)
            entries[name] = digest
    return entries
