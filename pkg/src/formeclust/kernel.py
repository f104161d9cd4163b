"""Edit-distance kernel over cluster units.

A cluster unit (page, recto page, or sheet side) carries one quantized
title per slot. Unit distance compares slot k of one unit only with slot k
of the other — titles in different positions are printed by different
parts of a skeleton and must never be compared — and reduces per-slot edit
distances with a p-norm.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from math import isinf
from pathlib import Path

import numpy as np

from . import _fastlev
from .profiling import QuantizedTitle


@dataclass
class Slot:
    """One title position of a unit; ``title`` stays None for blank pages."""

    position: int
    page_index: int | None = None
    title: QuantizedTitle | None = None


@dataclass
class ClusterUnit:
    id: str
    slots: list[Slot] = field(default_factory=list)

    @property
    def n_slots(self) -> int:
        return len(self.slots)


@dataclass
class DistanceMatrix:
    unit_ids: list[str]
    d: np.ndarray  # (n, n) float64, symmetric, zero diagonal

    def __post_init__(self):
        self.d = np.asarray(self.d, dtype=np.float64)
        n = len(self.unit_ids)
        if self.d.shape != (n, n):
            raise ValueError(f"matrix shape {self.d.shape} does not match {n} unit ids")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.unit_ids)
        for row in self.d:
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "DistanceMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        ids = rows[0]
        d = np.array([[float(v) for v in row] for row in rows[1:]], dtype=np.float64)
        return cls(unit_ids=ids, d=d)


def _as_codes(seq) -> np.ndarray:
    if isinstance(seq, QuantizedTitle):
        seq = seq.symbols
    if isinstance(seq, str):
        return np.array([ord(c) for c in seq], dtype=np.int64)
    if isinstance(seq, bytes):
        return np.frombuffer(seq, dtype=np.uint8).astype(np.int64)
    return np.asarray(seq, dtype=np.int64)


def levenshtein(a, b) -> int:
    """Minimum number of single-symbol edits turning ``a`` into ``b``.

    Accepts strings, bytes, or integer sequences. Symbols are recoded to a
    dense alphabet and handed to the bit-parallel core.
    """
    ca, cb = _as_codes(a), _as_codes(b)
    if ca.size == 0 or cb.size == 0:
        return int(ca.size + cb.size)
    _, coded = np.unique(np.concatenate([ca, cb]), return_inverse=True)
    coded = coded.astype(np.int64)
    return int(_fastlev.myers_distance(coded[: ca.size], coded[ca.size:]))


def title_distance(
    x: QuantizedTitle | None,
    y: QuantizedTitle | None,
    normalize: bool = False,
) -> float:
    """Edit distance between two titles, with the absent-title convention.

    A missing title costs the full length of the present one (all
    insertions, the worst case); two missing titles cost nothing.
    """
    if x is None and y is None:
        return 0.0
    if x is None or y is None:
        worst = len(y) if x is None else len(x)
        return 1.0 if (normalize and worst > 0) else float(worst)
    if not x.same_binning(y):
        raise ValueError(
            f"cannot compare titles with different binning: "
            f"({x.n_bins},{x.strategy}) vs ({y.n_bins},{y.strategy})"
        )
    d = float(_fastlev.myers_distance(x.symbols.astype(np.int64), y.symbols.astype(np.int64)))
    if normalize and max(len(x), len(y)) > 0:
        d /= max(len(x), len(y))
    return d


def unit_distance(u: ClusterUnit, v: ClusterUnit, p: float = 4.0, normalize: bool = False) -> float:
    """p-norm over the per-position title distances of two aligned units."""
    if u.n_slots != v.n_slots:
        raise ValueError(f"slot count mismatch: {u.id} has {u.n_slots}, {v.id} has {v.n_slots}")
    if p < 1:
        raise ValueError(f"norm order must satisfy p >= 1, got {p}")
    dists = [
        title_distance(su.title, sv.title, normalize=normalize)
        for su, sv in zip(u.slots, v.slots)
    ]
    if isinf(p):
        return max(dists) if dists else 0.0
    return float(sum(d ** p for d in dists) ** (1.0 / p))


def distance_matrix(
    units: list[ClusterUnit],
    p: float = 4.0,
    normalize: bool = False,
) -> DistanceMatrix:
    """All pairwise unit distances, computed once per pair and mirrored."""
    if len(units) < 2:
        raise ValueError(f"need at least 2 units, got {len(units)}")
    n_slots = units[0].n_slots
    for u in units[1:]:
        if u.n_slots != n_slots:
            raise ValueError(f"slot count mismatch: {units[0].id} vs {u.id}")
    if p < 1:
        raise ValueError(f"norm order must satisfy p >= 1, got {p}")

    ref = None
    for u in units:
        for s in u.slots:
            if s.title is not None:
                if ref is None:
                    ref = s.title
                elif not ref.same_binning(s.title):
                    raise ValueError("all titles in a book must share one binning config")

    chunks: list[np.ndarray] = []
    starts = np.zeros((len(units), n_slots), dtype=np.int64)
    lengths = np.full((len(units), n_slots), -1, dtype=np.int64)
    offset = 0
    for i, u in enumerate(units):
        for k, slot in enumerate(u.slots):
            if slot.title is None:
                continue
            codes = slot.title.symbols.astype(np.int64)
            starts[i, k] = offset
            lengths[i, k] = codes.size
            chunks.append(codes)
            offset += codes.size
    symbols = np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.int64)

    d = _fastlev.pairwise_distances(symbols, starts, lengths, float(p), normalize)
    return DistanceMatrix(unit_ids=[u.id for u in units], d=d)


def save_distances_csv(dm: DistanceMatrix, path: str | Path) -> None:
    from .io import atomic_write

    atomic_write(path, dm.to_csv())


def load_distances_csv(path: str | Path) -> DistanceMatrix:
    return DistanceMatrix.from_csv(Path(path).read_text())


__all__ = [
    "Slot",
    "ClusterUnit",
    "DistanceMatrix",
    "levenshtein",
    "title_distance",
    "unit_distance",
    "distance_matrix",
    "save_distances_csv",
    "load_distances_csv",
]
