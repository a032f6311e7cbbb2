"""CSV / JSON persistence of experiment records."""

from __future__ import annotations

import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path

from .config import ExperimentRecord

FORMATS = ("csv", "json")


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(record: ExperimentRecord, fmt: str) -> str:
    """Serialize ``record``; CSV carries the rows, JSON the full record."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(record.columns)
        for row in record.rows:
            writer.writerow([_cell(row.get(c)) for c in record.columns])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps(record.to_dict(), indent=2, allow_nan=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def emit(record: ExperimentRecord, fmt: str, path: str | Path | None) -> None:
    """Write ``record`` to ``path`` atomically (temp file + rename); ``None`` or '-' means stdout."""
    text = render(record, fmt)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
