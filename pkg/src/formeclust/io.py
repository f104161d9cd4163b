"""Small file helpers shared across the package."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path


def atomic_write(path: str | Path, data: str | bytes) -> None:
    """Write via a temp file in the target directory, then rename into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = data.encode() if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def quantized_titles_csv(units) -> str:
    """Sidecar CSV of quantized titles: page_index,position,symbols."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["page_index", "position", "symbols"])
    for u in units:
        for slot in u.slots:
            if slot.title is not None:
                writer.writerow([slot.page_index, slot.position, slot.title.digits()])
    return buf.getvalue()


def read_unit_label_csv(path: str | Path, value_column: str) -> dict[str, str]:
    """Read a two-column unit CSV (e.g. gold.csv) into an id -> value map."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows or rows[0][0] != "unit_id" or rows[0][1] != value_column:
        raise ValueError(f"{path}: expected header 'unit_id,{value_column}'")
    return {r[0]: r[1] for r in rows[1:]}
