"""Deterministic stand-in codec for desk-scale tests.

Geometry is quantized by scale ``s`` (positions become round(x*s)/s,
duplicates retained) and colors by a per-channel step 2^((q-4)/6). The
reported rate follows a fixed analytic model so sweep and search results
are exactly reproducible:

    bpp = 1.2 * s^0.9  +  3.0 * s^0.9 * 2^(-(q-4)/6)

with the first term counted as the geometry substream.
"""

from __future__ import annotations

import numpy as np

from .cloud import PointCloud, infer_bit_depth
from .errors import DomainError

S_DOMAIN = (0.0, 1.0)  # lower bound exclusive
Q_DOMAIN = (4, 51)


def _check_domain(s: float, q: int) -> None:
    if not 0.0 < s <= 1.0:
        raise DomainError(f"scale s must lie in (0, 1], got {s}")
    if not (isinstance(q, (int, np.integer)) and Q_DOMAIN[0] <= q <= Q_DOMAIN[1]):
        raise DomainError(f"q must be an integer in [4, 51], got {q!r}")


def mock_rate(point_count: int, s: float, q: int) -> tuple[float, float, float]:
    """(bpp, geometry_bytes, total_bytes) under the analytic rate model."""
    _check_domain(s, q)
    geom_bpp = 1.2 * s ** 0.9
    color_bpp = 3.0 * s ** 0.9 * 2.0 ** (-(q - 4) / 6.0)
    bpp = geom_bpp + color_bpp
    total_bytes = bpp * point_count / 8.0
    geometry_bytes = geom_bpp * point_count / 8.0
    return bpp, geometry_bytes, total_bytes


def mock_decode(content: PointCloud, s: float, q: int) -> PointCloud:
    """Decoded cloud under scale/step quantization."""
    _check_domain(s, q)
    positions = np.round(content.positions * s) / s
    colors = None
    if content.has_colors:
        step = 2.0 ** ((q - 4) / 6.0)
        quantized = np.round(content.colors.astype(np.float64) / step) * step
        colors = np.clip(np.round(quantized), 0, 255).astype(np.uint8)
    # Inverse scaling can push the top voxel slightly past the declared
    # peak; widen the precision just enough to keep the range invariant.
    bit_depth = max(content.bit_depth, infer_bit_depth(positions))
    return PointCloud(positions=positions, colors=colors,
                      bit_depth=bit_depth, name=f"{content.name}-mock")


def mock_color_step(q: int) -> float:
    return 2.0 ** ((q - 4) / 6.0)
