"""Book structure: formats, gatherings, and page-to-sheet-side imposition.

Early modern books were printed on large sheets, each side of a sheet
carrying 2 (folio), 4 (quarto) or 8 (octavo) pages in a non-sequential
arrangement chosen so that folding yields pages in reading order. This
module maps every page of a book deterministically to its
(gathering, sheet, side, position) coordinate, which is what lets titles
be grouped into sheet-side units for clustering.

The imposition tables below are hard-coded for the gathering shapes that
actually occur in the supported corpus: folio with two nested sheets per
gathering, single-sheet quarto, and single-sheet octavo. Anything else
fails loudly instead of guessing.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .kernel import ClusterUnit, Slot

SCHEMES = ("all_pages", "recto_pages", "sheet_sides")


class ManifestError(ValueError):
    """A manifest violates the format or one of its structural invariants."""


class Format(str, Enum):
    FOLIO = "folio"
    QUARTO = "quarto"
    OCTAVO = "octavo"

    @property
    def pages_per_sheet_side(self) -> int:
        return {Format.FOLIO: 2, Format.QUARTO: 4, Format.OCTAVO: 8}[self]

    @classmethod
    def parse(cls, name: str) -> "Format":
        try:
            return cls(name)
        except ValueError:
            raise ManifestError(f"unknown format kind: {name!r}") from None


# Local page numbers (1-based within a gathering) listed in position order
# for each sheet side. Derived by folding a paper model: one vertical fold
# for folio, vertical+horizontal for quarto, vertical+horizontal+vertical
# for octavo, reading each face row-major as physically viewed. Position k
# of every side then consistently holds a recto or a verso page, so slot k
# is always compared against typographically like material.
IMPOSITION_TABLES: dict[tuple[Format, int], tuple[dict[str, tuple[int, ...]], ...]] = {
    (Format.FOLIO, 4): (
        {"outer": (1, 8), "inner": (7, 2)},
        {"outer": (3, 6), "inner": (5, 4)},
    ),
    (Format.QUARTO, 4): (
        {"outer": (5, 8, 4, 1), "inner": (7, 6, 2, 3)},
    ),
    (Format.OCTAVO, 8): (
        {"outer": (13, 4, 1, 16, 12, 5, 8, 9), "inner": (15, 2, 3, 14, 10, 7, 6, 11)},
    ),
}

SIDES = ("outer", "inner")


@dataclass(frozen=True)
class SheetSideCoord:
    """Where a page sits: which gathering, sheet, face, and title position."""

    gathering_id: str
    sheet_index: int
    side: str
    position: int

    @property
    def side_id(self) -> str:
        return f"{self.gathering_id}.s{self.sheet_index}.{self.side}"


@dataclass
class PageRecord:
    global_index: int
    gathering_id: str
    image_path: str | None = None
    gold_label: str | None = None


@dataclass
class Gathering:
    id: str
    leaves: int
    page_span: tuple[int, int]  # half-open global range, 1-based
    partial: bool = False

    @property
    def n_pages(self) -> int:
        return self.page_span[1] - self.page_span[0]


@dataclass
class BookManifest:
    title: str
    format: Format
    leaves_per_gathering: int
    gatherings: list[Gathering]
    pages: list[PageRecord]
    merge_sheet_sides: bool = False
    gold_unit_labels: dict[str, str] = field(default_factory=dict)

    @property
    def n_pages(self) -> int:
        return len(self.pages)

    def page(self, global_index: int) -> PageRecord:
        return self.pages[global_index - 1]


def parse_manifest(data: bytes | str | dict) -> BookManifest:
    """Parse and validate a JSON book manifest.

    Raises ManifestError for malformed documents, unknown formats,
    non-contiguous page indices, or gathering sizes inconsistent with
    ``leaves_per_gathering``. A short final gathering is accepted with a
    warning and flagged partial.
    """
    if isinstance(data, (bytes, str)):
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as e:
            raise ManifestError(f"malformed manifest JSON: {e}") from None
    else:
        doc = data
    if not isinstance(doc, dict):
        raise ManifestError("manifest must be a JSON object")
    for key in ("title", "format", "leaves_per_gathering", "gatherings"):
        if key not in doc:
            raise ManifestError(f"manifest missing required key {key!r}")

    fmt = Format.parse(doc["format"])
    leaves = int(doc["leaves_per_gathering"])
    if leaves < 1:
        raise ManifestError("leaves_per_gathering must be positive")
    expect_pages = 2 * leaves

    gatherings: list[Gathering] = []
    pages: list[PageRecord] = []
    next_index = 1
    raw_gatherings = doc["gatherings"]
    if not raw_gatherings:
        raise ManifestError("manifest has no gatherings")
    for gi, g in enumerate(raw_gatherings):
        gid = str(g["id"])
        raw_pages = g.get("pages", [])
        if not raw_pages:
            raise ManifestError(f"gathering {gid!r} has no pages")
        start = next_index
        for p in raw_pages:
            idx = int(p["index"])
            if idx != next_index:
                raise ManifestError(
                    f"page indices must be contiguous 1..N: expected {next_index}, got {idx}"
                )
            pages.append(
                PageRecord(
                    global_index=idx,
                    gathering_id=gid,
                    image_path=p.get("image"),
                    gold_label=None if p.get("gold_label") is None else str(p["gold_label"]),
                )
            )
            next_index += 1
        n = next_index - start
        partial = False
        if n != expect_pages:
            if gi == len(raw_gatherings) - 1 and n < expect_pages:
                partial = True
                warnings.warn(
                    f"final gathering {gid!r} has {n} pages, expected {expect_pages}; "
                    "treating it as partial",
                    stacklevel=2,
                )
            else:
                raise ManifestError(
                    f"gathering size mismatch: gathering {gid!r} spans {n} pages, "
                    f"expected {expect_pages} for {leaves} leaves"
                )
        gatherings.append(
            Gathering(id=gid, leaves=leaves, page_span=(start, next_index), partial=partial)
        )

    gold_units = {str(k): str(v) for k, v in (doc.get("gold_unit_labels") or {}).items()}
    return BookManifest(
        title=str(doc["title"]),
        format=fmt,
        leaves_per_gathering=leaves,
        gatherings=gatherings,
        pages=pages,
        merge_sheet_sides=bool(doc.get("merge_sheet_sides", False)),
        gold_unit_labels=gold_units,
    )


def manifest_to_dict(m: BookManifest) -> dict:
    doc: dict = {
        "title": m.title,
        "format": m.format.value,
        "leaves_per_gathering": m.leaves_per_gathering,
        "gatherings": [
            {
                "id": g.id,
                "pages": [
                    {
                        "index": p.global_index,
                        "image": p.image_path,
                        "gold_label": p.gold_label,
                    }
                    for p in m.pages[g.page_span[0] - 1: g.page_span[1] - 1]
                ],
            }
            for g in m.gatherings
        ],
    }
    if m.merge_sheet_sides:
        doc["merge_sheet_sides"] = True
    if m.gold_unit_labels:
        doc["gold_unit_labels"] = dict(m.gold_unit_labels)
    return doc


def serialize_manifest(m: BookManifest) -> str:
    return json.dumps(manifest_to_dict(m), indent=2) + "\n"


def load_manifest(path: str | Path) -> BookManifest:
    return parse_manifest(Path(path).read_bytes())


def _gathering_table(m: BookManifest) -> tuple[dict[str, tuple[int, ...]], ...]:
    key = (m.format, m.leaves_per_gathering)
    try:
        return IMPOSITION_TABLES[key]
    except KeyError:
        raise ManifestError(
            f"no imposition table for {m.format.value} with "
            f"{m.leaves_per_gathering} leaves per gathering"
        ) from None


def impose(m: BookManifest) -> dict[int, SheetSideCoord]:
    """Map every page index to its sheet-side coordinate.

    Pages of incomplete sheets (from a partial final gathering) are left
    out: imposition is undefined when conjugate leaves are missing.
    """
    table = _gathering_table(m)
    coords: dict[int, SheetSideCoord] = {}
    for g in m.gatherings:
        start, stop = g.page_span
        for sheet_index, sides in enumerate(table):
            for side, local_pages in sides.items():
                globals_ = [start + lp - 1 for lp in local_pages]
                if any(gp >= stop for gp in globals_):
                    continue  # incomplete sheet in a partial gathering
                for position, gp in enumerate(globals_):
                    coords[gp] = SheetSideCoord(
                        gathering_id=g.id, sheet_index=sheet_index, side=side, position=position
                    )
    return coords


def build_units(m: BookManifest, scheme: str) -> list[ClusterUnit]:
    """Materialize the clustering units for a scheme, titles not yet attached.

    all_pages    one single-slot unit per page, in book order
    recto_pages  one single-slot unit per odd page index
    sheet_sides  one unit per complete sheet side, slots in position order,
                 units ordered by their earliest page; with the manifest's
                 merge_sheet_sides flag both sides of a sheet collapse into
                 one unit (outer positions first)
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown unit scheme: {scheme!r}")
    if scheme == "all_pages":
        return [
            ClusterUnit(id=f"p{p.global_index}", slots=[Slot(position=0, page_index=p.global_index)])
            for p in m.pages
        ]
    if scheme == "recto_pages":
        return [
            ClusterUnit(id=f"p{p.global_index}", slots=[Slot(position=0, page_index=p.global_index)])
            for p in m.pages
            if p.global_index % 2 == 1
        ]

    table = _gathering_table(m)
    pps = m.format.pages_per_sheet_side
    units: list[ClusterUnit] = []
    for g in m.gatherings:
        start, stop = g.page_span
        for sheet_index, sides in enumerate(table):
            per_side: dict[str, list[int] | None] = {}
            for side in SIDES:
                globals_ = [start + lp - 1 for lp in sides[side]]
                per_side[side] = None if any(gp >= stop for gp in globals_) else globals_
            if m.merge_sheet_sides:
                if per_side["outer"] is None or per_side["inner"] is None:
                    continue
                slots = [
                    Slot(position=k, page_index=gp)
                    for k, gp in enumerate(per_side["outer"] + per_side["inner"])
                ]
                units.append(ClusterUnit(id=f"{g.id}.s{sheet_index}", slots=slots))
            else:
                for side in SIDES:
                    pages = per_side[side]
                    if pages is None:
                        continue
                    slots = [Slot(position=k, page_index=gp) for k, gp in enumerate(pages)]
                    units.append(
                        ClusterUnit(id=f"{g.id}.s{sheet_index}.{side}", slots=slots)
                    )
    units.sort(key=lambda u: min(s.page_index for s in u.slots))
    assert all(len(u.slots) == pps * (2 if m.merge_sheet_sides else 1) for u in units)
    return units


def gold_labels_for_units(m: BookManifest, units: list[ClusterUnit]) -> list[str] | None:
    """Resolve gold labels for the given units, or None if not fully annotated.

    Page units read the page's gold label. Sheet-side units prefer the
    manifest's unit-level map and otherwise require their constituent
    pages' labels to agree.
    """
    labels: list[str] = []
    for u in units:
        label: str | None = None
        if u.id in m.gold_unit_labels:
            label = m.gold_unit_labels[u.id]
        else:
            page_labels = {
                m.page(s.page_index).gold_label
                for s in u.slots
                if s.page_index is not None and m.page(s.page_index).gold_label is not None
            }
            if len(page_labels) == 1:
                label = page_labels.pop()
            elif len(page_labels) > 1:
                raise ManifestError(
                    f"unit {u.id} spans pages with conflicting gold labels: {sorted(page_labels)}"
                )
        if label is None:
            return None
        labels.append(label)
    return labels


def signature_series(n: int) -> list[str]:
    """Gathering signature labels in the conventional A, B, ... AA, BB style."""
    out = []
    for i in range(n):
        letter = chr(ord("A") + i % 26)
        out.append(letter * (1 + i // 26))
    return out


def make_manifest(
    title: str,
    format: Format | str,
    leaves_per_gathering: int,
    n_gatherings: int,
    image_for_page=None,
    gold_for_page=None,
    merge_sheet_sides: bool = False,
) -> BookManifest:
    """Construct a regular manifest programmatically (used by the generator)."""
    fmt = Format.parse(format) if isinstance(format, str) else format
    per = 2 * leaves_per_gathering
    gatherings = []
    pages = []
    idx = 1
    for gid in signature_series(n_gatherings):
        start = idx
        for _ in range(per):
            pages.append(
                PageRecord(
                    global_index=idx,
                    gathering_id=gid,
                    image_path=None if image_for_page is None else image_for_page(idx),
                    gold_label=None if gold_for_page is None else gold_for_page(idx),
                )
            )
            idx += 1
        gatherings.append(
            Gathering(id=gid, leaves=leaves_per_gathering, page_span=(start, idx))
        )
    return BookManifest(
        title=title,
        format=fmt,
        leaves_per_gathering=leaves_per_gathering,
        gatherings=gatherings,
        pages=pages,
        merge_sheet_sides=merge_sheet_sides,
    )
