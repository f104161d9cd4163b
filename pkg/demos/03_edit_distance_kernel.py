"""
The edit-distance kernel over sheet sides
=========================================

Titles are compared with Levenshtein distance on their symbol strings, and
a sheet side's per-position distances are reduced with a p-norm. Position k
is only ever compared with position k: different positions are printed by
different parts of the skeleton, so cross-position similarity is
meaningless by construction.
"""

import numpy as np

from formeclust import Slot, ClusterUnit, distance_matrix, levenshtein, unit_distance
from formeclust.profiling import QuantizedTitle

print("edit distances on plain strings:")
for a, b in [("12324", "1224"), ("333", ""), ("0011223344", "0011523344")]:
    print(f"  d({a!r:12s}, {b!r:12s}) = {levenshtein(a, b)}")


def title(symbols):
    return QuantizedTitle(symbols=np.array(symbols, dtype=np.uint8),
                          n_bins=5, strategy="quantile")


def sheet_side(uid, *titles):
    return ClusterUnit(uid, [Slot(position=k, page_index=k + 1, title=t)
                             for k, t in enumerate(titles)])


# Two quarto sheet sides: slots 0 and 2 agree, slots 1 and 3 differ a little.
u = sheet_side("B.s0.outer", title([0, 0, 3, 3, 0]), title([1, 1, 0, 4]),
               title([2, 2, 2]), title([0, 4, 4, 0]))
v = sheet_side("C.s0.outer", title([0, 0, 3, 3, 0]), title([1, 0, 0, 4]),
               title([2, 2, 2]), title([4, 4, 0, 0]))

# Lower p weighs all positions equally; p = infinity keeps only the worst
# position. The default p=4 sits near the max without discarding the rest.
for p in (1, 2, 4, float("inf")):
    print(f"unit distance at p={p!s:4}: {unit_distance(u, v, p=p):.4f}")

# A blank page costs the full width of the title it failed to show.
w = sheet_side("D.s0.outer", title([0, 0, 3, 3, 0]), None,
               title([2, 2, 2]), title([0, 4, 4, 0]))
print(f"with one absent title, p=1: {unit_distance(u, w, p=1):.1f}")

# The pairwise matrix computes each pair once and mirrors it.
dm = distance_matrix([u, v, w], p=4)
print("unit ids:", dm.unit_ids)
print(np.array_str(dm.d, precision=3))
