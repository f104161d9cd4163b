"""
Spectral clustering, stage by stage
===================================

The distance matrix is sparsified into a k-nearest-neighbor graph, the
graph's normalized Laplacian is eigendecomposed, and seeded k-means runs on
the bottom eigenvectors. With well-separated groups the graph splits into
components and the embedding collapses each component to a point.
"""

import numpy as np

from formeclust.kernel import DistanceMatrix
from formeclust.spectral import (
    cluster,
    kmeans,
    knn_graph,
    normalized_laplacian,
    spectral_embedding,
)

# Plant three groups of sheet sides: tiny distances inside a group, large
# distances between groups (plus a little noise so nothing is degenerate).
rng = np.random.default_rng(4)
sizes = [7, 6, 7]
n = sum(sizes)
d = rng.uniform(20, 30, size=(n, n))
start = 0
for s in sizes:
    d[start:start + s, start:start + s] = rng.uniform(0, 1, size=(s, s))
    start += s
d = (d + d.T) / 2
np.fill_diagonal(d, 0)
dm = DistanceMatrix(unit_ids=[f"u{i}" for i in range(n)], d=d)

a = knn_graph(dm, k_neighbors=5)
print(f"kNN graph: {int(a.sum()) // 2} edges, symmetric={bool((a == a.T).all())}")

lap = normalized_laplacian(a)
eigvals = np.linalg.eigvalsh(lap)
print("smallest Laplacian eigenvalues:", np.round(eigvals[:5], 4))
print("(three near-zero values = three connected components)")

emb = spectral_embedding(lap, d=3)
print("distinct embedding rows (rounded):",
      len({tuple(np.round(row, 6)) for row in emb}))

labels = kmeans(emb, K=3, seed=0)
print("k-means labels:", labels)

# The one-call version wires the stages together.
assignment = cluster(dm, K=3, k_neighbors=5, seed=0)
truth = np.repeat([0, 1, 2], sizes)
agreement = len({(t, p) for t, p in zip(truth, assignment.labels)})
print("planted groups recovered exactly:", agreement == 3)
