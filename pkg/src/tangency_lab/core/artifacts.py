"""
Artifact writers for tangency-lab runs.

Every numeric output goes to JSON or CSV. CSV cells use 17 significant
digits; JSON floats use the shortest round-trip representation, which is
exact. A run ends with a manifest.json listing every file with the sha256
digest of its body. CSV files may start with a '#' comment line carrying
the timestamp; that line is excluded from the digest so reruns with the
same seed give equal digests.
"""

import csv
import hashlib
import io
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from .models import (
    ContinuationCurve,
    Manifest,
    ManifestEntry,
    ModuliProfile,
    ScanResult,
    TangencyEvent,
    TypeChangeEvent,
)

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"

Table = Tuple[List[str], List[List[Any]]]


def format_number(value: Any) -> str:
    """A CSV cell: floats with 17 significant digits, complex as re+imj."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        if value.imag == 0:
            return f"{value.real:.17g}"
        return f"{value.real:.17g}{value.imag:+.17g}j"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if value is None:
        return ""
    return str(value)


def to_plain(value: Any) -> Any:
    """JSON-ready form of models, numpy values and complex numbers."""
    if isinstance(value, BaseModel):
        return to_plain(value.model_dump(mode="json"))
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Path):
        return str(value)
    return value


def dumps(payload: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(to_plain(payload), indent=2, sort_keys=True) + "\n"


def _digest_body(text: str) -> str:
    lines = text.splitlines(keepends=True)
    if lines and lines[0].startswith("#"):
        lines = lines[1:]
    return hashlib.sha256("".join(lines).encode("utf-8")).hexdigest()


class ArtifactWriter:
    """
    Writes artifacts into one output directory and keeps the manifest.

    Writes are expected to be serialized by the caller; the scenario
    engine only writes after all work items have been gathered.
    """

    def __init__(self, out_dir: Path, timestamp: bool = True):
        self.out_dir = Path(out_dir)
        self.timestamp = timestamp
        self.entries: List[ManifestEntry] = []
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def _record(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        entry = ManifestEntry(path=name, sha256=_digest_body(text), size=len(text.encode("utf-8")))
        self.entries = [e for e in self.entries if e.path != name] + [entry]
        logger.debug(f"wrote {path} ({entry.size} bytes)")
        return path

    def write_json(self, name: str, payload: Any) -> Path:
        """Write a JSON artifact."""
        return self._record(name, dumps(payload))

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        """
        Write a CSV artifact with full-precision cells.

        Args:
            name: File name relative to the output directory
            header: Column names
            rows: Row values, formatted by format_number
        """
        buffer = io.StringIO()
        if self.timestamp:
            buffer.write(f"# generated {datetime.now().isoformat()}\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_number(v) for v in row])
        return self._record(name, buffer.getvalue())

    def write_manifest(
        self,
        command: str,
        seed: int,
        settings: Optional[Dict[str, Any]] = None,
        warnings: Optional[List[str]] = None,
        errors: Optional[List[Dict[str, Any]]] = None,
    ) -> Manifest:
        """Write manifest.json listing every artifact written so far."""
        manifest = Manifest(
            command=command,
            seed=seed,
            settings=to_plain(settings or {}),
            entries=sorted(self.entries, key=lambda e: e.path),
            warnings=list(warnings or []),
            errors=to_plain(list(errors or [])),
        )
        (self.out_dir / MANIFEST_NAME).write_text(dumps(manifest), encoding="utf-8")
        logger.info(f"manifest with {len(manifest.entries)} entries written to {self.out_dir}")
        return manifest


# exporters


def scan_result_table(result: ScanResult) -> Table:
    """(n, lambda_n) rows of a scaling fit."""
    header = ["n", "re_lambda", "im_lambda", "abs_lambda"]
    rows = [
        [n, complex(lam).real, complex(lam).imag, abs(complex(lam))]
        for n, lam in zip(result.indices, result.parameters)
    ]
    return header, rows


def scan_result_summary(result: ScanResult) -> Dict[str, Any]:
    """Fit summary written next to the (n, lambda_n) table."""
    return result.model_dump(mode="json", exclude={"indices", "parameters"})


def events_table(events: Sequence[TangencyEvent]) -> Table:
    """One row per tangency event."""
    header = ["index", "re_lambda", "im_lambda", "abs_lambda", "re_y", "im_y", "residual", "h", "m"]
    rows = []
    for e in events:
        lam, y = complex(e.parameter[0]), complex(e.point[0])
        h = e.record.h if e.record is not None else None
        m = e.record.m if e.record is not None else None
        rows.append([e.index, lam.real, lam.imag, abs(lam), y.real, y.imag, e.residual, h, m])
    return header, rows


def curve_table(curve: ContinuationCurve) -> Table:
    """Continuation samples with arclength and residual."""
    header = ["arclength", *curve.unknowns, "residual"]
    rows = [[s, *p, r] for s, p, r in zip(curve.arclength, curve.points, curve.residuals)]
    return header, rows


def profile_table(profile: ModuliProfile) -> Table:
    """Moduli and Jacobian per curve sample."""
    width = max((len(s.parameter) for s in profile.samples), default=0)
    header = [*(f"p{i}" for i in range(width)), "moduli", "re_jacobian", "im_jacobian", "identity_error"]
    rows = []
    for s in profile.samples:
        jac = complex(s.jacobian)
        rows.append([*s.parameter, s.moduli, jac.real, jac.imag, s.identity_error])
    return header, rows


def type_change_table(events: Sequence[TypeChangeEvent]) -> Table:
    """Refined type-change parameters."""
    width = max((len(e.parameter) for e in events), default=1)
    header = [*(f"p{i}" for i in range(width)), "period", "kind", "modulus_gap"]
    rows = [[*e.parameter, e.period, e.kind, e.modulus_gap] for e in events]
    return header, rows
