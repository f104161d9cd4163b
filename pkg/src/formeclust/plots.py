"""Staircase plots and sheet-side montages.

The staircase plot shows cluster assignments as one dot per unit, laid out
in book order with gathering signatures repeated along the x-axis exactly
as they occur; read left to right it traces how skeletons rotate through
the book. SVG is emitted directly (text, diffable, no plotting backend).

The montage stacks unit title crops into a grid where every column is one
forme position, the layout annotators use to compare like with like.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np
from PIL import Image

_MARGIN_L = 70
_MARGIN_R = 20
_MARGIN_T = 28
_MARGIN_B = 34
_DX = 12
_DY = 16


def _panel(
    out: list[str],
    y0: int,
    unit_ids: list[str],
    labels,
    gatherings: list[str],
    n_levels: int,
    caption: str,
    css_class: str,
) -> int:
    n = len(unit_ids)
    height = (n_levels - 1) * _DY
    out.append(
        f'<text x="{_MARGIN_L - 8}" y="{y0 - 10}" class="caption">{escape(caption)}</text>'
    )
    for level in range(n_levels):
        y = y0 + height - level * _DY
        out.append(f'<text x="{_MARGIN_L - 10}" y="{y + 4}" class="ylab">{level}</text>')
        out.append(
            f'<line x1="{_MARGIN_L}" y1="{y}" x2="{_MARGIN_L + (n - 1) * _DX}" y2="{y}" class="grid"/>'
        )
    for i, lab in enumerate(labels):
        x = _MARGIN_L + i * _DX
        y = y0 + height - int(lab) * _DY
        out.append(f'<circle class="{css_class}" cx="{x}" cy="{y}" r="3.5"/>')
    # one signature tick per consecutive run of the same gathering
    tick_y = y0 + height + 16
    prev = None
    for i, g in enumerate(gatherings):
        if g != prev:
            out.append(
                f'<text x="{_MARGIN_L + i * _DX}" y="{tick_y}" class="xlab">{escape(g)}</text>'
            )
            prev = g
    return y0 + height + _MARGIN_B


def staircase_svg(
    unit_ids: list[str],
    labels,
    gatherings: list[str],
    gold=None,
) -> str:
    """Cluster-id-vs-book-order scatter; gold labels add a second panel below."""
    n = len(unit_ids)
    if n == 0 or len(labels) != n or len(gatherings) != n:
        raise ValueError("unit_ids, labels, and gatherings must be equal-length and nonempty")
    labels = [int(v) for v in labels]
    panels = [("predicted", labels, "pred")]
    if gold is not None:
        if len(gold) != n:
            raise ValueError("gold labels length mismatch")
        gold_levels = {g: i for i, g in enumerate(sorted(set(gold)))}
        panels.append(("gold", [gold_levels[g] for g in gold], "gold"))

    body: list[str] = []
    y = _MARGIN_T + 14
    max_levels = 1
    for caption, vals, cls in panels:
        n_levels = max(vals) + 1 if vals else 1
        max_levels = max(max_levels, n_levels)
        y = _panel(body, y, unit_ids, vals, gatherings, n_levels, caption, cls)
    width = _MARGIN_L + (n - 1) * _DX + _MARGIN_R
    height = y
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
        "<style>"
        ".pred{fill:#2b6cb0;}.gold{fill:#c05621;}"
        ".grid{stroke:#ddd;stroke-width:1;}"
        ".caption{font:12px sans-serif;fill:#333;}"
        ".xlab,.ylab{font:10px sans-serif;fill:#555;text-anchor:middle;}"
        ".ylab{text-anchor:end;}"
        "</style>"
    )
    return head + "".join(body) + "</svg>\n"


def montage(unit_images: list[list[np.ndarray | None]], pad: int = 3) -> Image.Image:
    """Grid image: one row per unit, one column per position, blanks left white.

    ``unit_images`` holds ink arrays (1 = ink); cells are sized to the
    largest crop and not rescaled.
    """
    if not unit_images:
        raise ValueError("montage needs at least one unit")
    n_cols = max(len(row) for row in unit_images)
    heights = [img.shape[0] for row in unit_images for img in row if img is not None]
    widths = [img.shape[1] for row in unit_images for img in row if img is not None]
    cell_h = max(heights) if heights else 24
    cell_w = max(widths) if widths else 120
    out_w = n_cols * (cell_w + pad) + pad
    out_h = len(unit_images) * (cell_h + pad) + pad
    canvas = Image.new("L", (out_w, out_h), color=255)
    for r, row in enumerate(unit_images):
        for c, img in enumerate(row):
            if img is None:
                continue
            pixels = np.round((1.0 - np.clip(img, 0.0, 1.0)) * 255.0).astype(np.uint8)
            tile = Image.fromarray(pixels, mode="L")
            canvas.paste(tile, (pad + c * (cell_w + pad), pad + r * (cell_h + pad)))
    return canvas


def save_svg(svg: str, path: str | Path) -> None:
    from .io import atomic_write

    atomic_write(path, svg)
