"""Turn running-title crops into quantized symbol sequences.

A title image is reduced to a 1-D ink profile by averaging ink over each
pixel column, then the profile is discretized into a small symbol alphabet.
The resulting sequences are what the edit-distance kernel compares, so the
conventions here (polarity, normalization, bin edges) are pinned down
precisely.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

STRATEGIES = ("uniform", "quantile", "kmeans")


@dataclass(frozen=True)
class QuantizedTitle:
    """A running title as a symbol sequence over ``{0 .. n_bins-1}``.

    ``symbols`` keeps one entry per pixel column of the source crop; widths
    are deliberately not rescaled, so sequence length varies title to title.
    """

    symbols: np.ndarray  # uint8, shape (W,)
    n_bins: int
    strategy: str

    def __post_init__(self):
        object.__setattr__(self, "symbols", np.asarray(self.symbols, dtype=np.uint8))
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown quantization strategy: {self.strategy!r}")

    def __len__(self) -> int:
        return int(self.symbols.shape[0])

    def same_binning(self, other: "QuantizedTitle") -> bool:
        return self.n_bins == other.n_bins and self.strategy == other.strategy

    def digits(self) -> str:
        """Symbols as a digit string (requires an alphabet of at most 10)."""
        if self.n_bins > 10:
            raise ValueError("digit-string form only supports n_bins <= 10")
        return "".join(str(int(s)) for s in self.symbols)


def validate_title_image(pixels: np.ndarray) -> np.ndarray:
    """Check an ink image: 2-D, nonempty, values in [0, 1], ink = high."""
    img = np.asarray(pixels, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"title image must be 2-D and nonempty, got shape {img.shape}")
    if img.min() < 0.0 or img.max() > 1.0:
        raise ValueError("title image values must lie in [0, 1]")
    return img


def load_title_image(path: str | Path) -> np.ndarray:
    """Load a PNG/PGM crop as a float image with ink high.

    RGB inputs are converted to luma; 8-bit values are rescaled to [0, 1]
    and the polarity is inverted so 0 means blank paper and 1 full ink.
    """
    with Image.open(path) as im:
        if im.mode in ("I", "I;16"):
            scale = 65535.0
        else:
            if im.mode != "L":
                im = im.convert("L")
            scale = 255.0
        arr = np.asarray(im, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise OSError(f"{path}: expected a nonempty grayscale image")
    return 1.0 - arr / scale


def binarize(img: np.ndarray) -> np.ndarray:
    """Threshold an ink image to {0, 1} with Otsu's method.

    256 candidate splits spread over the image's own value range are scored
    by exact between-class variance and the best one (lowest on ties) wins.
    Constant images degenerate to all-zero output.
    """
    img = validate_title_image(img)
    lo, hi = float(img.min()), float(img.max())
    if hi <= lo:
        return np.zeros_like(img)
    flat = np.sort(img.ravel())
    total = flat.size
    prefix = np.cumsum(flat)
    thresholds = lo + (hi - lo) * np.arange(1, 256) / 256.0
    below = np.searchsorted(flat, thresholds)  # class sizes under each split
    w0 = below.astype(np.float64)
    w1 = total - w0
    valid = (below > 0) & (below < total)
    mu0 = np.zeros_like(w0)
    mu1 = np.zeros_like(w0)
    mu0[valid] = prefix[below[valid] - 1] / w0[valid]
    mu1[valid] = (prefix[-1] - prefix[below[valid] - 1]) / w1[valid]
    between = np.where(valid, w0 * w1 * (mu0 - mu1) ** 2, -1.0)
    t = thresholds[int(np.argmax(between))]  # ties resolve to the lowest split
    return (img >= t).astype(np.float64)


def column_profile(img: np.ndarray, height_normalize: bool = True) -> np.ndarray:
    """Mean ink per pixel column (or the raw column sum when not normalized).

    Height normalization keeps profiles comparable across crops of
    different heights and is the default.
    """
    img = validate_title_image(img)
    return img.mean(axis=0) if height_normalize else img.sum(axis=0)


def quantize(profile: np.ndarray, n_bins: int = 5, strategy: str = "quantile") -> QuantizedTitle:
    """Discretize an ink profile into ``n_bins`` symbols.

    uniform   equal-width intervals over [min, max] of the profile,
              half-open on the right with the last interval closed.
    quantile  symbol = floor(rank * n_bins / W) where rank counts the
              values strictly below; equal values share a symbol.
    kmeans    1-D k-means (quantile-midpoint init, <= 50 iterations),
              symbols ordered by ascending centroid.

    All strategies map a constant profile to all-zero symbols.
    """
    if not 2 <= n_bins <= 256:
        raise ValueError(f"n_bins must be in [2, 256], got {n_bins}")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown quantization strategy: {strategy!r}")
    values = np.asarray(profile, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("profile must be a nonempty 1-D vector")
    w = values.size
    lo, hi = float(values.min()), float(values.max())

    if hi <= lo:
        symbols = np.zeros(w, dtype=np.uint8)
    elif strategy == "uniform":
        symbols = np.floor((values - lo) / (hi - lo) * n_bins).astype(np.int64)
        symbols = np.minimum(symbols, n_bins - 1).astype(np.uint8)
    elif strategy == "quantile":
        order = np.argsort(values, kind="stable")
        rank = np.empty(w, dtype=np.int64)
        rank[order] = np.arange(w)
        # equal values take the rank of their first occurrence in sorted order
        sorted_vals = values[order]
        first = np.empty(w, dtype=np.int64)
        first[0] = 0
        for i in range(1, w):
            first[i] = first[i - 1] if sorted_vals[i] == sorted_vals[i - 1] else i
        min_rank = np.empty(w, dtype=np.int64)
        min_rank[order] = first
        symbols = np.minimum(min_rank * n_bins // w, n_bins - 1).astype(np.uint8)
    else:
        symbols = _kmeans_1d(values, n_bins)

    return QuantizedTitle(symbols=symbols, n_bins=n_bins, strategy=strategy)


def _kmeans_1d(values: np.ndarray, n_bins: int, max_iter: int = 50) -> np.ndarray:
    """Deterministic 1-D Lloyd iteration seeded at evenly spaced quantiles."""
    centroids = np.quantile(values, (np.arange(n_bins) + 0.5) / n_bins)
    labels = None
    for _ in range(max_iter):
        # nearest centroid, equidistant ties to the lower index
        dist = np.abs(values[:, None] - centroids[None, :])
        new_labels = np.argmin(dist, axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(n_bins):
            sel = labels == c
            if sel.any():
                centroids[c] = values[sel].mean()
    order = np.argsort(centroids, kind="stable")
    remap = np.empty(n_bins, dtype=np.int64)
    remap[order] = np.arange(n_bins)
    return remap[labels].astype(np.uint8)


def global_bin_edges(profiles: list[np.ndarray], n_bins: int, strategy: str) -> np.ndarray:
    """Shared bin edges over the pooled values of many profiles.

    Used when binning is per book rather than per image: every title is
    then cut at the same ``n_bins - 1`` ascending edge values.
    """
    if not 2 <= n_bins <= 256:
        raise ValueError(f"n_bins must be in [2, 256], got {n_bins}")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown quantization strategy: {strategy!r}")
    pool = np.concatenate([np.asarray(p, dtype=np.float64) for p in profiles])
    if pool.size == 0:
        raise ValueError("no profile values to pool")
    lo, hi = float(pool.min()), float(pool.max())
    if hi <= lo:
        return np.full(n_bins - 1, np.inf)  # degenerate pool: everything bins to 0
    if strategy == "uniform":
        return lo + (hi - lo) * np.arange(1, n_bins) / n_bins
    if strategy == "quantile":
        return np.quantile(pool, np.arange(1, n_bins) / n_bins)
    labels = _kmeans_1d(pool, n_bins)
    centroids = np.sort([pool[labels == c].mean() for c in range(n_bins) if (labels == c).any()])
    edges = (centroids[:-1] + centroids[1:]) / 2.0
    return np.pad(edges, (0, n_bins - 1 - edges.size), constant_values=np.inf)


def quantize_with_edges(profile: np.ndarray, edges: np.ndarray,
                        n_bins: int, strategy: str) -> QuantizedTitle:
    """Discretize a profile against precomputed (book-level) bin edges."""
    values = np.asarray(profile, dtype=np.float64)
    symbols = np.searchsorted(edges, values, side="right").astype(np.uint8)
    return QuantizedTitle(symbols=symbols, n_bins=n_bins, strategy=strategy)


def quantize_image(
    img: np.ndarray,
    n_bins: int = 5,
    strategy: str = "quantile",
    apply_binarize: bool = True,
    height_normalize: bool = True,
) -> QuantizedTitle:
    """Full per-title pipeline: optional Otsu binarization, profile, quantize."""
    if apply_binarize:
        img = binarize(img)
    return quantize(column_profile(img, height_normalize), n_bins=n_bins, strategy=strategy)
