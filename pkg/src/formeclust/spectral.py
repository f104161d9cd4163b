"""Spectral clustering of the unit distance matrix.

Distances are sparsified into a symmetric k-nearest-neighbor graph, the
graph's normalized Laplacian is eigendecomposed, units are embedded in the
bottom eigenvectors, and a seeded k-means partitions the embedding. Every
stage is deterministic given its inputs and the seed.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .kernel import DistanceMatrix

PRNG_ID = "numpy:PCG64"


@dataclass
class ClusterAssignment:
    unit_ids: list[str]
    labels: np.ndarray  # (n,) int64

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if len(self.unit_ids) != self.labels.shape[0]:
            raise ValueError("labels and unit_ids length mismatch")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["unit_id", "label"])
        for uid, lab in zip(self.unit_ids, self.labels):
            writer.writerow([uid, int(lab)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ClusterAssignment":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["unit_id", "label"]:
            raise ValueError("labels CSV must start with a 'unit_id,label' header")
        ids = [r[0] for r in rows[1:]]
        labels = np.array([int(r[1]) for r in rows[1:]], dtype=np.int64)
        return cls(unit_ids=ids, labels=labels)


def save_labels_csv(a: ClusterAssignment, path: str | Path) -> None:
    from .io import atomic_write

    atomic_write(path, a.to_csv())


def load_labels_csv(path: str | Path) -> ClusterAssignment:
    return ClusterAssignment.from_csv(Path(path).read_text())


def _distances(D: DistanceMatrix | np.ndarray) -> np.ndarray:
    d = D.d if isinstance(D, DistanceMatrix) else np.asarray(D, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("distance matrix must be square")
    return d


def knn_graph(D: DistanceMatrix | np.ndarray, k_neighbors: int) -> np.ndarray:
    """Binary adjacency: i~j when either is among the other's k nearest.

    Neighbor ranking breaks distance ties by lower index; the union
    symmetrization can leave some rows with more than k ones.
    """
    d = _distances(D)
    n = d.shape[0]
    if not 1 <= k_neighbors < n:
        raise ValueError(f"k_neighbors must be in [1, {n - 1}], got {k_neighbors}")
    a = np.zeros((n, n), dtype=np.uint8)
    for i in range(n):
        row = d[i].copy()
        row[i] = np.inf
        nearest = np.argsort(row, kind="stable")[:k_neighbors]
        a[i, nearest] = 1
    a = np.maximum(a, a.T)
    np.fill_diagonal(a, 0)
    return a


def normalized_laplacian(A: np.ndarray) -> np.ndarray:
    """Symmetric normalized Laplacian; isolated vertices get a unit diagonal."""
    A = np.asarray(A, dtype=np.float64)
    deg = A.sum(axis=1)
    inv_sqrt = np.zeros_like(deg)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    L = -inv_sqrt[:, None] * A * inv_sqrt[None, :]
    np.fill_diagonal(L, 1.0)
    return L


def spectral_embedding(L: np.ndarray, d: int) -> np.ndarray:
    """Rows of the ``d`` bottom eigenvectors of L, row-normalized.

    Repeated eigenvalues make the basis rotation-ambiguous, so downstream
    consumers must only rely on the induced geometry, never coordinates.
    """
    L = np.asarray(L, dtype=np.float64)
    n = L.shape[0]
    if not 1 <= d <= n:
        raise ValueError(f"embedding dimension must be in [1, {n}], got {d}")
    eigvals, eigvecs = np.linalg.eigh(L)  # ascending; raises LinAlgError on failure
    coords = eigvecs[:, :d].copy()
    norms = np.linalg.norm(coords, axis=1)
    nz = norms > 0
    coords[nz] /= norms[nz, None]
    return coords


def _kmeans_pp_init(X: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((K, X.shape[1]))
    chosen = np.zeros(n, dtype=bool)
    first = int(rng.integers(n))
    centers[0] = X[first]
    chosen[first] = True
    d2 = ((X - centers[0]) ** 2).sum(axis=1)
    for c in range(1, K):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(np.flatnonzero(~chosen)[0])  # all remaining mass zero
        centers[c] = X[idx]
        chosen[idx] = True
        d2 = np.minimum(d2, ((X - centers[c]) ** 2).sum(axis=1))
    return centers


def _lloyd(X: np.ndarray, centers: np.ndarray, max_iter: int) -> tuple[np.ndarray, float]:
    K = centers.shape[0]
    labels = None
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        own = d2[np.arange(X.shape[0]), new_labels]
        for c in range(K):
            if not (new_labels == c).any():
                far = int(np.argmax(own))  # reseed empty cluster at the worst-fit point
                centers[c] = X[far]
                new_labels[far] = c
                own[far] = 0.0
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(K):
            sel = labels == c
            if sel.any():
                centers[c] = X[sel].mean(axis=0)
    d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(X.shape[0]), labels].sum())
    return labels.astype(np.int64), inertia


def kmeans(
    E: np.ndarray,
    K: int,
    seed: int,
    n_restarts: int = 5,
    max_iter: int = 300,
) -> np.ndarray:
    """Seeded k-means++ over embedding rows; best inertia of ``n_restarts``.

    All randomness comes from PCG64 streams spawned from ``seed``, so the
    labeling is reproducible across runs and machines.
    """
    X = np.asarray(E, dtype=np.float64)
    n = X.shape[0]
    if not 1 <= K <= n:
        raise ValueError(f"K must be in [1, {n}], got {K}")
    best_labels, best_inertia = None, np.inf
    for child in np.random.SeedSequence(seed).spawn(n_restarts):
        rng = np.random.Generator(np.random.PCG64(child))
        centers = _kmeans_pp_init(X, K, rng)
        labels, inertia = _lloyd(X, centers.copy(), max_iter)
        if inertia < best_inertia:
            best_labels, best_inertia = labels, inertia
    return best_labels


def cluster(
    D: DistanceMatrix,
    K: int,
    k_neighbors: int = 5,
    seed: int = 0,
    n_restarts: int = 5,
) -> ClusterAssignment:
    """Full pipeline: kNN graph, normalized Laplacian, embedding, k-means."""
    A = knn_graph(D, k_neighbors)
    L = normalized_laplacian(A)
    E = spectral_embedding(L, K)
    labels = kmeans(E, K, seed=seed, n_restarts=n_restarts)
    ids = D.unit_ids if isinstance(D, DistanceMatrix) else [str(i) for i in range(len(labels))]
    return ClusterAssignment(unit_ids=ids, labels=labels)
