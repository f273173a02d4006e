"""Survivor archive, its two update policies, and warm-started k-means scoring.

The archive is a fixed-capacity store of survivor genomes (genes only, no
fitness) with a monotone arrival index per slot.  Clustering the archive and
normalizing the per-cluster member counts yields the selection scores used to
filter candidate offspring.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Archive:
    """Fixed-capacity store of gene vectors in arrival order."""

    capacity: int
    genes: np.ndarray  # (size, dim), size <= capacity
    arrival: np.ndarray  # (size,) strictly increasing insertion stamps
    next_arrival: int

    @property
    def size(self) -> int:
        return self.genes.shape[0]


def init_archive(
    capacity: int,
    bounds: tuple[np.ndarray, np.ndarray],
    rng: np.random.Generator,
) -> Archive:
    """Fill a fresh archive with ``capacity`` uniform points in the box."""
    if capacity < 1:
        raise ValueError(f"capacity must be >= 1, got {capacity}")
    lower, upper = bounds
    genes = rng.uniform(lower, upper, size=(capacity, lower.shape[0]))
    return Archive(capacity, genes, np.arange(capacity, dtype=np.int64), capacity)


def _as_batch(batch) -> np.ndarray:
    arr = np.asarray(batch, dtype=float)
    if arr.ndim == 1:  # empty list
        arr = arr.reshape(0, 0)
    return arr


def _stamp(archive: Archive, positions: np.ndarray, batch: np.ndarray) -> None:
    n = len(positions)
    archive.genes[positions] = batch
    archive.arrival[positions] = archive.next_arrival + np.arange(n)
    archive.next_arrival += n


def update_random(archive: Archive, batch, rng: np.random.Generator) -> Archive:
    """Overwrite |batch| uniformly chosen distinct slots with the batch.

    Replaced slots get fresh arrival stamps.  An empty batch changes nothing
    and consumes no randomness.
    """
    arr = _as_batch(batch)
    if arr.shape[0] == 0:
        return archive
    if arr.shape[0] > archive.size:
        raise ValueError(f"batch of {arr.shape[0]} exceeds archive size {archive.size}")
    positions = rng.choice(archive.size, size=arr.shape[0], replace=False)
    _stamp(archive, positions, arr)
    return archive


def update_sequential(archive: Archive, batch) -> Archive:
    """Replace the oldest |batch| entries (smallest arrival stamps), FIFO."""
    arr = _as_batch(batch)
    if arr.shape[0] == 0:
        return archive
    if arr.shape[0] > archive.size:
        raise ValueError(f"batch of {arr.shape[0]} exceeds archive size {archive.size}")
    positions = np.argsort(archive.arrival)[: arr.shape[0]]
    _stamp(archive, positions, arr)
    return archive


@dataclass
class ClusterModel:
    """Converged Lloyd clustering of the archive."""

    k: int
    centroids: np.ndarray  # (k, dim)
    labels: np.ndarray  # (n,) cluster id per archive entry
    inertia: float
    n_iter: int
    inertia_history: list[float] = field(default_factory=list, repr=False)


def _sq_distances(
    points: np.ndarray, centroids: np.ndarray, points_sq: np.ndarray | None = None
) -> np.ndarray:
    """Squared Euclidean distances, (n, k), via the expanded product form."""
    d = points @ centroids.T
    d *= -2.0
    if points_sq is None:
        points_sq = np.einsum("ij,ij->i", points, points)
    d += points_sq[:, None]
    d += np.einsum("ij,ij->i", centroids, centroids)[None, :]
    np.maximum(d, 0.0, out=d)
    return d


def kmeans_fit(
    points: np.ndarray,
    k: int,
    init_centroids: np.ndarray | None = None,
    rng: np.random.Generator | None = None,
    max_iters: int = 100,
    tol: float = 1e-6,
) -> ClusterModel:
    """Lloyd's algorithm with deterministic empty-cluster repair.

    Iterates assign/recompute until the largest centroid shift drops below
    ``tol`` or ``max_iters`` is hit, then relabels once so the returned labels
    are consistent with the returned centroids.  A cluster left empty by an
    assignment is reseeded at the point currently farthest from its own
    centroid (largest first, each point used at most once per iteration).

    Without ``init_centroids`` the start is k distinct points sampled
    uniformly, which requires ``rng``.  Passing the previous generation's
    centroids warm-starts the fit.
    """
    points = np.asarray(points, dtype=float)
    n, dim = points.shape
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n:
        raise ValueError(f"k = {k} exceeds the {n} available points")
    if init_centroids is not None:
        centroids = np.array(init_centroids, dtype=float)
        if centroids.shape != (k, dim):
            raise ValueError(
                f"init_centroids shape {centroids.shape} != expected {(k, dim)}"
            )
    else:
        if rng is None:
            raise ValueError("rng is required when init_centroids is not given")
        centroids = points[rng.choice(n, size=k, replace=False)].copy()

    rows = np.arange(n)
    points_sq = np.einsum("ij,ij->i", points, points)
    # Full distance matrix computed once; afterwards only the columns of
    # centroids that actually moved are refreshed (most stay put per
    # iteration at archive scale).
    dists = _sq_distances(points, centroids, points_sq)
    history: list[float] = []
    n_iter = 0
    for _ in range(max_iters):
        n_iter += 1
        labels = np.argmin(dists, axis=1)
        history.append(float(dists[rows, labels].sum()))

        counts = np.bincount(labels, minlength=k)
        sums = np.zeros((k, dim))
        for j in range(dim):
            sums[:, j] = np.bincount(labels, weights=points[:, j], minlength=k)
        new_centroids = centroids.copy()
        nonzero = counts > 0
        new_centroids[nonzero] = sums[nonzero] / counts[nonzero, None]

        empties = np.flatnonzero(~nonzero)
        if empties.size:
            own = dists[rows, labels].copy()
            for e in empties:
                far = int(np.argmax(own))
                new_centroids[e] = points[far]
                own[far] = -1.0

        delta = new_centroids - centroids
        moved = np.flatnonzero(np.any(delta != 0.0, axis=1))
        shift = float(np.sqrt(np.max(np.einsum("ij,ij->i", delta, delta))))
        centroids = new_centroids
        if moved.size:
            dists[:, moved] = _sq_distances(points, centroids[moved], points_sq)
        if shift < tol:
            break

    labels = np.argmin(dists, axis=1)
    inertia = float(dists[rows, labels].sum())
    return ClusterModel(k, centroids, labels, inertia, n_iter, history)


def compute_scores(model: ClusterModel, archive_size: int) -> np.ndarray:
    """Per-cluster selection probabilities: member count / archive size."""
    return np.bincount(model.labels, minlength=model.k) / float(archive_size)


def nearest_cluster(model: ClusterModel, point: np.ndarray) -> int:
    """Cluster id with the closest centroid; ties break to the lowest id."""
    d = np.sum((model.centroids - np.asarray(point, dtype=float)) ** 2, axis=1)
    return int(np.argmin(d))


def assign_clusters(model: ClusterModel, points: np.ndarray) -> np.ndarray:
    """Vectorized nearest_cluster over rows of ``points``.

    Ties follow the argmin of the computed distances; for continuous data
    this coincides with the lowest-id rule of ``nearest_cluster``.
    """
    return np.argmin(_sq_distances(np.asarray(points, dtype=float), model.centroids), axis=1)
