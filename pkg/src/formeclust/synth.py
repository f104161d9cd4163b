"""Synthetic books with known skeleton-forme assignments.

Each forme is modeled as one latent ink profile per title position:
piecewise-constant word blocks whose widths and inter-block gaps carry the
forme identity, mirroring how real skeletons differ in spacing rather than
position. Sheet sides are stamped with their forme's profiles under
controllable per-impression noise (global shift, inking scale, additive
pixel noise), yielding a book where the true clustering is known exactly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .imposition import BookManifest, Format, build_units, make_manifest
from .kernel import ClusterUnit


@dataclass(frozen=True)
class NoiseSpec:
    offset_max_frac: float = 0.0
    pixel_noise_sd: float = 0.0
    inking_scale_range: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        if not 0.0 <= self.offset_max_frac <= 0.2:
            raise ValueError("offset_max_frac must lie in [0, 0.2]")
        if self.pixel_noise_sd < 0:
            raise ValueError("pixel_noise_sd must be nonnegative")
        lo, hi = self.inking_scale_range
        if not 0 < lo <= hi:
            raise ValueError("inking_scale_range must satisfy 0 < lo <= hi")


@dataclass
class SynthSpec:
    format: Format
    leaves_per_gathering: int
    n_gatherings: int
    n_formes: int
    title_width: int = 360
    title_height: int = 32
    forme_schedule: str | list[int] = "round_robin"
    noise: NoiseSpec = field(default_factory=NoiseSpec)

    def __post_init__(self):
        if isinstance(self.format, str):
            self.format = Format.parse(self.format)
        if self.n_formes < 1:
            raise ValueError("n_formes must be >= 1")
        if self.n_gatherings < 1:
            raise ValueError("n_gatherings must be >= 1")
        if self.title_width < 40:
            raise ValueError("title_width must be >= 40")
        if self.title_height < 4:
            raise ValueError("title_height must be >= 4")
        if isinstance(self.forme_schedule, list):
            if any(not 0 <= f < self.n_formes for f in self.forme_schedule):
                raise ValueError("every forme_schedule entry must be < n_formes")
        elif self.forme_schedule != "round_robin":
            raise ValueError("forme_schedule must be 'round_robin' or an explicit list")


def spec_from_json(data: bytes | str | dict) -> SynthSpec:
    doc = json.loads(data) if isinstance(data, (bytes, str)) else data
    noise = doc.get("noise", {})
    return SynthSpec(
        format=Format.parse(doc["format"]),
        leaves_per_gathering=int(doc["leaves_per_gathering"]),
        n_gatherings=int(doc["n_gatherings"]),
        n_formes=int(doc["n_formes"]),
        title_width=int(doc.get("title_width", 360)),
        title_height=int(doc.get("title_height", 32)),
        forme_schedule=doc.get("forme_schedule", "round_robin"),
        noise=NoiseSpec(
            offset_max_frac=float(noise.get("offset_max_frac", 0.0)),
            pixel_noise_sd=float(noise.get("pixel_noise_sd", 0.0)),
            inking_scale_range=tuple(noise.get("inking_scale_range", (1.0, 1.0))),
        ),
    )


@dataclass
class SynthBook:
    manifest: BookManifest
    images: dict[int, np.ndarray]  # page index -> ink image
    unit_gold: dict[str, str]  # sheet-side unit id -> forme id
    units: list[ClusterUnit]

    def gold_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["unit_id", "forme_id"])
        for u in self.units:
            writer.writerow([u.id, self.unit_gold[u.id]])
        return buf.getvalue()


def _draw_layout(rng: np.random.Generator, width: int) -> list[list[int | float]]:
    """Word blocks as mutable [width, gap, height] triples filling the title."""
    margin = int(rng.integers(4, 10))
    layout: list[list[int | float]] = []
    cursor = margin
    while True:
        w = int(rng.integers(8, 19))
        g = int(rng.integers(8, 23))
        h = float(rng.uniform(0.5, 0.8))
        if cursor + w + 8 > width - 6:
            break
        layout.append([w, g, h])
        cursor += w + g
    if not layout:  # very narrow titles still get one block
        layout.append([max(4, width // 3), 4, 0.6])
    return layout


def _jitter_layout(rng: np.random.Generator, layout) -> list[list[int | float]]:
    out = []
    for w, g, h in layout:
        out.append([
            max(6, w + int(rng.integers(-4, 5))),
            max(2, g + int(rng.integers(-9, 10))),
            h,
        ])
    return out


def _render_layout(layout, width: int, margin: int = 6) -> np.ndarray:
    profile = np.zeros(width, dtype=np.float64)
    cursor = margin
    for w, g, h in layout:
        if cursor >= width:
            break
        profile[cursor: min(cursor + w, width)] = h
        cursor += w + g
    return profile


def perturb_profile(profile: np.ndarray, noise: NoiseSpec, seed) -> np.ndarray:
    """One impression of a latent profile: shift, inking scale, pixel noise.

    ``seed`` may be an int or a SeedSequence; the output is deterministic
    per seed and bitwise equal to the input when the noise spec is zero.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    values = np.asarray(profile, dtype=np.float64)
    w = values.size
    max_shift = int(noise.offset_max_frac * w)
    shift = int(rng.integers(-max_shift, max_shift + 1)) if max_shift > 0 else 0
    if shift:
        out = np.zeros_like(values)
        if shift > 0:
            out[shift:] = values[:-shift]
        else:
            out[:shift] = values[-shift:]
    else:
        out = values.copy()
    lo, hi = noise.inking_scale_range
    if (lo, hi) != (1.0, 1.0):
        out = out * rng.uniform(lo, hi)
    if noise.pixel_noise_sd > 0:
        out = out + rng.normal(0.0, noise.pixel_noise_sd, size=w)
    return np.clip(out, 0.0, 1.0)


def render_profile_image(profile: np.ndarray, height: int) -> np.ndarray:
    """Ink image whose column means reproduce the profile exactly.

    Column j gets floor(v*height) fully inked rows plus one fractional
    pixel, so mean-over-height recovers v without quantization loss.
    """
    values = np.clip(np.asarray(profile, dtype=np.float64), 0.0, 1.0)
    w = values.size
    img = np.zeros((height, w), dtype=np.float64)
    target = values * height
    full = np.floor(target).astype(np.int64)
    frac = target - full
    rows = np.arange(height)[:, None]
    img[rows < full[None, :]] = 1.0
    partial = (frac > 0) & (full < height)
    img[full[partial], np.flatnonzero(partial)] = frac[partial]
    return img


def generate_book(spec: SynthSpec, seed: int, title: str | None = None) -> SynthBook:
    """Generate a complete annotated book for a spec, reproducible per seed."""
    manifest = make_manifest(
        title=title or f"synthetic-{spec.format.value}-{seed}",
        format=spec.format,
        leaves_per_gathering=spec.leaves_per_gathering,
        n_gatherings=spec.n_gatherings,
        image_for_page=lambda i: f"titles/p{i}.png",
    )
    units = build_units(manifest, "sheet_sides")
    n_sides = len(units)
    if isinstance(spec.forme_schedule, list):
        if len(spec.forme_schedule) != n_sides:
            raise ValueError(
                f"forme_schedule lists {len(spec.forme_schedule)} sides, book has {n_sides}"
            )
        schedule = list(spec.forme_schedule)
    else:
        schedule = [t % spec.n_formes for t in range(n_sides)]

    pps = spec.format.pages_per_sheet_side
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0xB00C])))
    bases = [_draw_layout(rng, spec.title_width) for _ in range(pps)]
    latents: list[list[np.ndarray]] = []
    for f in range(spec.n_formes):
        per_position = []
        for k in range(pps):
            for _ in range(100):
                candidate = _render_layout(_jitter_layout(rng, bases[k]), spec.title_width)
                if all(
                    not np.array_equal(candidate, earlier[k]) for earlier in latents
                ):
                    break
            else:  # pragma: no cover - astronomically unlikely
                raise RuntimeError("could not draw distinct forme layouts")
            per_position.append(candidate)
        latents.append(per_position)

    images: dict[int, np.ndarray] = {}
    unit_gold: dict[str, str] = {}
    for t, unit in enumerate(units):
        f = schedule[t]
        unit_gold[unit.id] = str(f)
        for slot in unit.slots:
            prof = perturb_profile(
                latents[f][slot.position],
                spec.noise,
                np.random.SeedSequence([seed, t, slot.position]),
            )
            images[slot.page_index] = render_profile_image(prof, spec.title_height)
            manifest.page(slot.page_index).gold_label = str(f)
    manifest.gold_unit_labels = dict(unit_gold)
    return SynthBook(manifest=manifest, images=images, unit_gold=unit_gold, units=units)


def image_to_png_bytes(img: np.ndarray) -> bytes:
    """Encode an ink image as an 8-bit grayscale PNG (paper white, ink black)."""
    pixels = np.round((1.0 - np.clip(img, 0.0, 1.0)) * 255.0).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(pixels, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def write_book(book: SynthBook, out_dir: str | Path) -> Path:
    """Materialize manifest.json, titles/p{index}.png, and gold.csv."""
    from .imposition import serialize_manifest
    from .io import atomic_write

    out = Path(out_dir)
    (out / "titles").mkdir(parents=True, exist_ok=True)
    for idx, img in book.images.items():
        atomic_write(out / "titles" / f"p{idx}.png", image_to_png_bytes(img))
    atomic_write(out / "manifest.json", serialize_manifest(book.manifest))
    atomic_write(out / "gold.csv", book.gold_csv())
    return out
