"""End-to-end orchestration: manifest -> titles -> distances -> clusters.

This is the library face of the command line: everything here is callable
with in-memory images, which is how the test suite and the demo scripts
drive it without touching disk.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import profiling
from .imposition import BookManifest, build_units, gold_labels_for_units
from .kernel import ClusterUnit, DistanceMatrix, distance_matrix
from .metrics import EvalReport, evaluate
from .spectral import PRNG_ID, ClusterAssignment, cluster


@dataclass
class RunConfig:
    scheme: str = "sheet_sides"
    n_bins: int = 5
    bin_strategy: str = "quantile"
    bin_scope: str = "per_image"  # or "per_book": one shared set of edges
    p: float = 4.0
    k_neighbors: int = 5
    n_clusters: int | None = None
    seed: int = 0
    binarize: bool = True
    height_normalize: bool = True
    normalize: bool = False
    n_restarts: int = 5
    workers: int | None = None

    def as_dict(self) -> dict:
        d = asdict(self)
        d["p"] = self.p if np.isfinite(self.p) else "inf"
        return d


@dataclass
class RunResult:
    config: RunConfig
    units: list[ClusterUnit]
    distances: DistanceMatrix
    assignment: ClusterAssignment
    gold: list[str] | None
    eval_report: EvalReport | None
    timings: dict[str, float] = field(default_factory=dict)

    def report_dict(self) -> dict:
        return {
            "config": self.config.as_dict(),
            "prng": PRNG_ID,
            "n_units": len(self.units),
            "unit_ids": list(self.assignment.unit_ids),
            "labels": [int(v) for v in self.assignment.labels],
            "eval": None if self.eval_report is None else self.eval_report.as_dict(),
            "timings": {k: round(v, 6) for k, v in self.timings.items()},
        }


def _slot_image(
    manifest: BookManifest,
    page_index: int,
    images: dict[int, np.ndarray] | None,
    base: Path,
) -> np.ndarray | None:
    if images is not None:
        return images.get(page_index)
    page = manifest.page(page_index)
    if page.image_path is None:
        return None
    path = Path(page.image_path)
    if not path.is_absolute():
        path = base / path
    try:
        return profiling.load_title_image(path)
    except FileNotFoundError:
        raise OSError(f"page {page.global_index}: missing title image {path}") from None
    except OSError as e:
        raise OSError(f"page {page.global_index}: {e}") from None


def attach_titles(
    manifest: BookManifest,
    units: list[ClusterUnit],
    config: RunConfig,
    images: dict[int, np.ndarray] | None = None,
    base_dir: str | Path | None = None,
) -> None:
    """Fill every slot's quantized title; blank pages keep an absent title.

    ``images`` (page index -> ink array) overrides disk entirely; otherwise
    image paths resolve relative to ``base_dir``. Missing files raise
    OSError naming the page. With ``bin_scope="per_book"`` all profiles are
    collected first and cut at one shared set of bin edges.
    """
    if config.bin_scope not in ("per_image", "per_book"):
        raise ValueError(f"unknown bin_scope: {config.bin_scope!r}")
    base = Path(base_dir) if base_dir is not None else Path(".")
    profiles: list[tuple[object, np.ndarray]] = []
    for unit in units:
        for slot in unit.slots:
            img = _slot_image(manifest, slot.page_index, images, base)
            if img is None:
                slot.title = None
                continue
            if config.bin_scope == "per_image":
                slot.title = profiling.quantize_image(
                    img,
                    n_bins=config.n_bins,
                    strategy=config.bin_strategy,
                    apply_binarize=config.binarize,
                    height_normalize=config.height_normalize,
                )
            else:
                if config.binarize:
                    img = profiling.binarize(img)
                profiles.append((slot, profiling.column_profile(img, config.height_normalize)))
    if profiles:
        edges = profiling.global_bin_edges(
            [p for _, p in profiles], config.n_bins, config.bin_strategy
        )
        for slot, prof in profiles:
            slot.title = profiling.quantize_with_edges(
                prof, edges, config.n_bins, config.bin_strategy
            )


def run_cluster(
    manifest: BookManifest,
    config: RunConfig,
    images: dict[int, np.ndarray] | None = None,
    base_dir: str | Path | None = None,
) -> RunResult:
    """Run the full clustering pipeline on one book."""
    if config.workers is not None:
        import numba

        numba.set_num_threads(min(max(1, config.workers), numba.config.NUMBA_NUM_THREADS))

    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    units = build_units(manifest, config.scheme)
    gold = gold_labels_for_units(manifest, units)

    t = time.perf_counter()
    attach_titles(manifest, units, config, images=images, base_dir=base_dir)
    timings["profiling"] = time.perf_counter() - t

    k = config.n_clusters
    if k is None:
        if gold is None:
            raise ValueError("n_clusters not set and the manifest carries no gold labels")
        k = len(set(gold))

    t = time.perf_counter()
    dm = distance_matrix(units, p=config.p, normalize=config.normalize)
    timings["distance_matrix"] = time.perf_counter() - t

    t = time.perf_counter()
    assignment = cluster(
        dm, K=k, k_neighbors=config.k_neighbors, seed=config.seed, n_restarts=config.n_restarts
    )
    timings["clustering"] = time.perf_counter() - t

    report = evaluate(gold, assignment.labels) if gold is not None else None
    timings["total"] = time.perf_counter() - t0
    return RunResult(
        config=config,
        units=units,
        distances=dm,
        assignment=assignment,
        gold=gold,
        eval_report=report,
        timings=timings,
    )
