"""Facial action unit tables.

Ground-truth AU intensities are ingested from comma-separated files in the
layout the OpenFace toolkit emits: a header row naming intensity columns
``AU01_r`` ... ``AU45_r`` plus whatever bookkeeping columns the extractor
added.  We select the 17 intensity AUs by name, one row per video frame,
and clamp values into the nominal [0, 5] range.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import FormatError

# The 17 intensity-scored action units, in canonical order.
AU_COLUMNS = (
    "AU01_r", "AU02_r", "AU04_r", "AU05_r", "AU06_r", "AU07_r",
    "AU09_r", "AU10_r", "AU12_r", "AU14_r", "AU15_r", "AU17_r",
    "AU20_r", "AU23_r", "AU25_r", "AU26_r", "AU45_r",
)

AU_DIM = len(AU_COLUMNS)

AU_MIN, AU_MAX = 0.0, 5.0


def load_au_file(path: str | Path) -> tuple[np.ndarray, int]:
    """Read an AU intensity table.

    Returns ``(values, n_clamped)`` where values has shape (n_frames, 17)
    with columns in ``AU_COLUMNS`` order, and n_clamped counts entries that
    fell outside [0, 5] and were clamped.
    """
    path = Path(path)
    if not path.exists():
        raise FormatError(f"AU file not found: {path}")
    with path.open(newline="") as f:
        reader = csv.DictReader(f)
        header = [h.strip() for h in (reader.fieldnames or [])]
        missing = [c for c in AU_COLUMNS if c not in header]
        if missing:
            raise FormatError(
                f"{path}: missing AU columns: {', '.join(missing)}"
            )
        rows = []
        for row in reader:
            stripped = {k.strip(): v for k, v in row.items() if k is not None}
            try:
                rows.append([float(stripped[c]) for c in AU_COLUMNS])
            except (ValueError, KeyError) as exc:
                raise FormatError(f"{path}: bad AU row {reader.line_num}: {exc}")
    values = np.asarray(rows, dtype=np.float64).reshape(-1, AU_DIM)
    if not np.isfinite(values).all():
        raise FormatError(f"{path}: non-finite AU value")
    clamped = np.clip(values, AU_MIN, AU_MAX)
    n_clamped = int(np.count_nonzero(clamped != values))
    return clamped, n_clamped


def write_au_file(path: str | Path, values: np.ndarray) -> None:
    """Write an AU table in the same headed CSV layout the loader reads."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or values.shape[1] != AU_DIM:
        raise FormatError(f"AU table must be (n, {AU_DIM}), got {values.shape}")
    with Path(path).open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["frame", *AU_COLUMNS])
        for t, row in enumerate(values):
            writer.writerow([t] + [f"{v:.6f}" for v in row])
