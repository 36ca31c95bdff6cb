"""Point cloud data model.

Positions are stored as float64 even for voxelized content: decoded clouds
produced by scaled quantization are non-integer after inverse scaling.
Duplicate points are retained; codecs may emit them and metrics must see
exactly what the decoder produced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MissingAttributeError, ValidationError


def infer_bit_depth(positions: np.ndarray) -> int:
    """Smallest precision whose voxel range [0, 2^b - 1] covers the data."""
    peak = float(np.max(positions)) if positions.size else 0.0
    b = 1
    while 2 ** b - 1 < peak:
        b += 1
    return b


@dataclass(frozen=True)
class PointCloud:
    """A set of unconnected points with optional RGB attributes.

    Immutable after construction; safe to share across threads.
    """

    positions: np.ndarray
    colors: np.ndarray | None = None
    bit_depth: int = 10
    name: str = ""

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValidationError(f"positions must be (N, 3), got {pos.shape}")
        if pos.shape[0] == 0:
            raise ValidationError("point cloud must contain at least one point")
        if not np.all(np.isfinite(pos)):
            raise ValidationError("positions contain non-finite values")
        if np.min(pos) < 0:
            raise ValidationError("coordinates must be non-negative voxel units")
        if not isinstance(self.bit_depth, int) or self.bit_depth < 1:
            raise DomainError(f"bit_depth must be a positive integer, got {self.bit_depth!r}")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

        if self.colors is not None:
            col = np.asarray(self.colors)
            if col.shape != (pos.shape[0], 3):
                raise ValidationError(
                    f"colors must match positions, got {col.shape} vs {pos.shape[0]} points"
                )
            if col.dtype != np.uint8:
                if np.any((col < 0) | (col > 255)):
                    raise ValidationError("color channels must lie in [0, 255]")
                col = col.astype(np.uint8)
            col = np.ascontiguousarray(col)
            col.setflags(write=False)
            object.__setattr__(self, "colors", col)

    def __len__(self) -> int:
        return self.positions.shape[0]

    @property
    def has_colors(self) -> bool:
        return self.colors is not None

    @property
    def peak_value(self) -> float:
        return float(2 ** self.bit_depth - 1)

    def require_colors(self) -> np.ndarray:
        if self.colors is None:
            raise MissingAttributeError(f"point cloud {self.name!r} carries no colors")
        return self.colors

    def in_voxel_range(self) -> bool:
        """Whether every coordinate lies in [0, 2^bit_depth - 1]."""
        return bool(np.max(self.positions) <= self.peak_value)

    def with_name(self, name: str) -> "PointCloud":
        return PointCloud(self.positions, self.colors, self.bit_depth, name)


@dataclass(frozen=True)
class ContentDescriptor:
    """Catalog entry for one test model."""

    name: str
    point_count: int
    geometry_precision: int
    density_class: str
    density_factor: float
    color_gamut_volume: float

    def __post_init__(self):
        if self.point_count <= 0:
            raise ValidationError("point_count must be positive")
        if self.density_class not in ("Solid", "Dense", "Sparse"):
            raise DomainError(f"unknown density class {self.density_class!r}")
        if self.density_factor < 0:
            raise ValidationError("density_factor must be non-negative")
        if not 0.0 <= self.color_gamut_volume <= 1.0:
            raise ValidationError("color_gamut_volume must lie in [0, 1]")


# Features of the six evaluated contents.
CONTENT_CATALOG = {
    d.name: d
    for d in (
        ContentDescriptor("Bouquet", 3150249, 10, "Solid", 0.418, 0.41),
        ContentDescriptor("StMichael", 1871158, 10, "Solid", 0.418, 0.21),
        ContentDescriptor("Soldier", 1089091, 10, "Solid", 0.418, 0.01),
        ContentDescriptor("Thaidancer", 3130215, 12, "Solid", 0.328, 0.22),
        ContentDescriptor("House_without_roof", 4848745, 12, "Dense", 0.036, 0.13),
        ContentDescriptor("Boxer", 3493085, 12, "Dense", 0.048, 0.03),
    )
}

CONTENT_NAMES = tuple(CONTENT_CATALOG)


def stimulus_name(content: str, codec: str, strategy: str, rate: str) -> str:
    """Canonical stimulus id, e.g. ``Soldier-gpcc_p1_r2``."""
    return f"{content}-{codec.lower()}_p{strategy[-1]}_r{rate[-1]}"
