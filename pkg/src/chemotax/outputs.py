"""Atomic file writers for CSV, YAML and JSON outputs."""

from __future__ import annotations

import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np


def atomic_write_text(path, text: str):
    """Write via a temporary file in the same directory, then rename into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(rows, header, comment=None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    buf.write(",".join(header) + "\n")
    rows = np.atleast_2d(np.asarray(rows, dtype=float)) if len(rows) else np.zeros((0, len(header)))
    for r in rows:
        buf.write(",".join(f"{v:.17g}" for v in r) + "\n")
    return buf.getvalue()


def write_csv(path, rows, header, comment=None):
    atomic_write_text(path, csv_text(rows, header, comment))


def write_field_csv(path, f, L, t):
    """Row-major field dump with a ``# nx, ny, L, t`` header line."""
    f = np.atleast_2d(np.asarray(f, dtype=float))
    if f.shape[0] == 1:
        nx, ny = f.shape[1], 1
    else:
        nx, ny = f.shape
    buf = io.StringIO()
    buf.write(f"# nx={nx}, ny={ny}, L={L!r}, t={t!r}\n")
    for row in f:
        buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
    atomic_write_text(path, buf.getvalue())


def read_field_csv(path):
    """Inverse of ``write_field_csv``: returns ``(array, meta)``."""
    lines = Path(path).read_text().splitlines()
    meta = {}
    for part in lines[0].lstrip("# ").split(","):
        k, v = part.strip().split("=")
        meta[k] = float(v) if k in ("L", "t") else int(v)
    arr = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    if meta["ny"] == 1:
        arr = arr[0]
    return arr, meta


def write_json(path, obj):
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")
