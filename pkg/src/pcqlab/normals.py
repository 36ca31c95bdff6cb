"""Surface normal estimation for point-to-plane metrics.

Normals are the smallest-eigenvalue eigenvector of the covariance of each
point's k nearest neighbors (excluding the point itself), with a
deterministic sign rule: the first component larger than 1e-9 in magnitude
is made positive. Degenerate neighborhoods (all neighbors identical) fall
back to +z and are flagged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .cloud import PointCloud
from .errors import DomainError

_SIGN_EPS = 1e-9
FALLBACK_NORMAL = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class NormalField:
    """Per-point unit normals aligned with one reference cloud."""

    vectors: np.ndarray
    degenerate: np.ndarray  # bool mask of flagged fallback normals

    def __post_init__(self):
        vec = np.asarray(self.vectors, dtype=np.float64)
        if vec.ndim != 2 or vec.shape[1] != 3:
            raise ValueError(f"normals must be (N, 3), got {vec.shape}")
        vec.setflags(write=False)
        object.__setattr__(self, "vectors", vec)
        flags = np.asarray(self.degenerate, dtype=bool)
        flags.setflags(write=False)
        object.__setattr__(self, "degenerate", flags)

    def __len__(self) -> int:
        return self.vectors.shape[0]


def _orient(v: np.ndarray) -> np.ndarray:
    for comp in v:
        if abs(comp) > _SIGN_EPS:
            return v if comp > 0 else -v
    return v


def estimate_normals(cloud: PointCloud, k: int = 12) -> NormalField:
    """PCA normals over the k nearest neighbors of every point."""
    n = len(cloud)
    if k < 3:
        raise DomainError(f"k must be at least 3, got {k}")
    if n < k + 1:
        raise DomainError(f"need at least k+1={k + 1} points, cloud has {n}")

    pts = cloud.positions
    tree = cKDTree(pts)
    _, nbrs = tree.query(pts, k=k + 1)

    vectors = np.empty((n, 3))
    degenerate = np.zeros(n, dtype=bool)
    for i in range(n):
        row = nbrs[i]
        keep = row[row != i]
        if keep.shape[0] > k:
            keep = keep[:k]
        elif keep.shape[0] < k:
            # i did not appear among its own k+1 results (possible with
            # many coincident points); drop the farthest instead.
            keep = row[:k]
        hood = pts[keep]
        centered = hood - hood.mean(axis=0)
        cov = centered.T @ centered / k
        if np.trace(cov) <= 1e-24:
            vectors[i] = FALLBACK_NORMAL
            degenerate[i] = True
            continue
        eigvals, eigvecs = np.linalg.eigh(cov)
        normal = eigvecs[:, np.argmin(eigvals)]
        vectors[i] = _orient(normal / np.linalg.norm(normal))

    return NormalField(vectors=vectors, degenerate=degenerate)
