from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make tests/oracles.py importable

from formeclust import Format, NoiseSpec, SynthSpec, generate_book, make_manifest

# The reference corpus: (title, pages, recto pages, sheet sides, clusters,
# format, leaves per gathering). The folio row's published unit count treats
# a whole sheet as one unit, hence the merge flag in its tests.
REFERENCE_BOOKS = [
    ("Leviathan", 376, 188, 94, 20, Format.FOLIO, 4),
    ("Paradise Lost", 336, 168, 84, 12, Format.QUARTO, 4),
    ("King Lear", 48, 24, 12, 4, Format.QUARTO, 4),
    ("Mayor", 72, 36, 18, 6, Format.QUARTO, 4),
    ("Parthenissa", 248, 124, 62, 19, Format.QUARTO, 4),
    ("Institution", 80, 40, 10, 2, Format.OCTAVO, 8),
    ("Discourse", 192, 96, 24, 2, Format.OCTAVO, 8),
    ("Wisdom", 240, 120, 30, 8, Format.OCTAVO, 8),
]


def skeleton_manifest(title, pages, fmt, leaves, merge_sheet_sides=False):
    per_gathering = 2 * leaves
    assert pages % per_gathering == 0
    return make_manifest(
        title=title,
        format=fmt,
        leaves_per_gathering=leaves,
        n_gatherings=pages // per_gathering,
        merge_sheet_sides=merge_sheet_sides,
    )


@pytest.fixture(scope="session")
def reference_manifests():
    return {
        title: skeleton_manifest(title, pages, fmt, leaves)
        for title, pages, _, _, _, fmt, leaves in REFERENCE_BOOKS
    }


@pytest.fixture(scope="session")
def clean_quarto_book():
    """Noise-free quarto book: 9 gatherings, 3 formes round-robin.

    Six units per forme, so every unit has >= 5 same-forme peers and the
    default kNN graph (k=5) stays forme-pure at zero noise.
    """
    spec = SynthSpec(
        format=Format.QUARTO,
        leaves_per_gathering=4,
        n_gatherings=9,
        n_formes=3,
        title_width=200,
    )
    return generate_book(spec, seed=11)


@pytest.fixture(scope="session")
def noisy_folio_book():
    """Folio book with mild noise, used by pipeline-level tests."""
    spec = SynthSpec(
        format=Format.FOLIO,
        leaves_per_gathering=4,
        n_gatherings=8,
        n_formes=2,
        title_width=180,
        noise=NoiseSpec(offset_max_frac=0.05, pixel_noise_sd=0.02,
                        inking_scale_range=(0.9, 1.1)),
    )
    return generate_book(spec, seed=7)
