"""
Book structure and imposition
=============================

Early modern printers did not print pages in reading order. Each side of a
large sheet carried several pages arranged so that folding the sheet (and
nesting it with its gathering-mates) yields sequential pages. This script
walks through how the library models that.
"""

from formeclust import Format, build_units, impose, make_manifest

# A folio gathering of 4 leaves is two sheets, one folded inside the other.
# Eight pages end up in non-sequential pairs across the four sheet sides.
book = make_manifest("demo folio", Format.FOLIO, leaves_per_gathering=4, n_gatherings=1)
coords = impose(book)

print("folio, one 4-leaf gathering: page -> (sheet, side, position)")
for page in range(1, 9):
    c = coords[page]
    print(f"  page {page}: sheet {c.sheet_index}, {c.side:5s}, position {c.position}")

# The same book as clustering units. A sheet side groups the pages that were
# printed together by one skeleton forme, which is the unit the method
# actually clusters.
for scheme in ("all_pages", "recto_pages", "sheet_sides"):
    units = build_units(book, scheme)
    print(f"{scheme:12s}: {len(units):2d} units, "
          f"first={units[0].id} ({len(units[0].slots)} slot(s))")

# Quarto and octavo pack more pages per side; the outer forme of a quarto
# holds pages 1, 4, 5, 8 and the inner forme 2, 3, 6, 7.
quarto = make_manifest("demo quarto", Format.QUARTO, 4, 1)
outer = sorted(p for p, c in impose(quarto).items() if c.side == "outer")
print("quarto outer forme pages:", outer)

octavo = make_manifest("demo octavo", Format.OCTAVO, 8, 1)
outer = sorted(p for p, c in impose(octavo).items() if c.side == "outer")
print("octavo outer forme pages:", outer)

# Real book shapes, as unit counts per scheme. The 376-page folio appears
# twice: by the general two-pages-per-side rule, and with both sides of a
# sheet merged into one unit (the bibliographer's whole-sheet view).
print("\nbook shapes (pages / recto / sheet sides):")
for title, pages, fmt, leaves in [
    ("a 376-page folio", 376, Format.FOLIO, 4),
    ("a 248-page quarto", 248, Format.QUARTO, 4),
    ("a 240-page octavo", 240, Format.OCTAVO, 8),
]:
    m = make_manifest(title, fmt, leaves, pages // (2 * leaves))
    merged = make_manifest(title, fmt, leaves, pages // (2 * leaves), merge_sheet_sides=True)
    print(f"  {title}: {len(build_units(m, 'all_pages'))} / "
          f"{len(build_units(m, 'recto_pages'))} / "
          f"{len(build_units(m, 'sheet_sides'))} "
          f"(merged sheets: {len(build_units(merged, 'sheet_sides'))})")
