"""Exact nearest-neighbor index with deterministic tie-breaking.

Wraps a k-d tree; whenever two stored points are equidistant from a query,
the lowest point index wins, so golden tests and recolored clouds are
reproducible across platforms.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .cloud import PointCloud
from .errors import MissingAttributeError


class NeighborIndex:
    """Spatial index over one cloud's positions; immutable once built."""

    def __init__(self, points: np.ndarray):
        points = np.ascontiguousarray(np.asarray(points, dtype=np.float64))
        if points.ndim != 2 or points.shape[1] != 3 or points.shape[0] == 0:
            raise ValueError(f"expected a non-empty (N, 3) array, got {points.shape}")
        self._points = points
        self._tree = cKDTree(points)

    def __len__(self) -> int:
        return self._points.shape[0]

    @property
    def points(self) -> np.ndarray:
        return self._points

    def query(self, queries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Nearest stored point for each query row.

        Returns (indices, squared distances). Squared distances are
        recomputed from the resolved match in float64 so that the values
        agree bit-for-bit with a linear scan.
        """
        q = np.atleast_2d(np.asarray(queries, dtype=np.float64))
        n = self._points.shape[0]
        if n == 1:
            idx = np.zeros(q.shape[0], dtype=np.int64)
        else:
            dist, idx = self._tree.query(q, k=2)
            idx = idx[:, 0].astype(np.int64)
            # Equal first/second distances signal a tie that the tree may
            # have broken arbitrarily; re-resolve those rows exhaustively
            # over every point at the minimal distance.
            tied = dist[:, 0] == dist[:, 1]
            for row in np.nonzero(tied)[0]:
                idx[row] = self._resolve_tie(q[row], dist[row, 0])
        diff = q - self._points[idx]
        sq = np.einsum("ij,ij->i", diff, diff)
        return idx, sq

    def _resolve_tie(self, point: np.ndarray, radius: float) -> int:
        r = radius * (1.0 + 1e-9) + 1e-300
        candidates = np.asarray(self._tree.query_ball_point(point, r), dtype=np.int64)
        diff = self._points[candidates] - point
        sq = np.einsum("ij,ij->i", diff, diff)
        best = sq.min()
        return int(candidates[sq == best].min())

    def query_one(self, point) -> int:
        """Index of the nearest stored point (lowest index on ties)."""
        idx, _ = self.query(np.asarray(point, dtype=np.float64).reshape(1, 3))
        return int(idx[0])


def build_index(cloud: PointCloud) -> NeighborIndex:
    return NeighborIndex(cloud.positions)


def transfer_colors(source: PointCloud, target: PointCloud) -> PointCloud:
    """Recolor ``target`` geometry from its nearest neighbors in ``source``.

    Each target point receives the color of its exact nearest source point
    (lowest index on ties). Used to build reference colors on decoded
    geometry before color metrics are computed.
    """
    if source.colors is None:
        raise MissingAttributeError(
            f"source cloud {source.name!r} carries no colors to transfer"
        )
    idx, _ = NeighborIndex(source.positions).query(target.positions)
    return PointCloud(
        positions=target.positions,
        colors=source.colors[idx],
        bit_depth=target.bit_depth,
        name=target.name,
    )
