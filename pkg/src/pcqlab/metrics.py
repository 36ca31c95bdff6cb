"""Full-reference objective quality metrics between two point clouds.

All metrics use symmetric max-of-directions MSE and report ``math.inf``
as the explicit lossless marker (rendered as ``inf`` in CSV) instead of an
arbitrary large dB value.

Geometry PSNRs use the peak 3 * (2^bit_depth - 1)^2 so values stay
comparable with established point-cloud distortion tooling; the RGB to
YCbCr conversion uses BT.709 full-range coefficients so color numbers are
bit-stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cloud import PointCloud
from .errors import ConfigurationError, MissingAttributeError, SchemaError, ValidationError
from .neighbors import NeighborIndex
from .normals import NormalField, estimate_normals

LOSSLESS = math.inf

# BT.709 luma coefficients (full range).
_KR, _KG, _KB = 0.2126, 0.7152, 0.0722


@dataclass(frozen=True)
class YuvWeights:
    wy: float = 6.0
    wu: float = 1.0
    wv: float = 1.0

    def __post_init__(self):
        if min(self.wy, self.wu, self.wv) < 0:
            raise ValidationError("YUV weights must be non-negative")
        if self.wy + self.wu + self.wv <= 0:
            raise ValidationError("YUV weights must not all be zero")


DEFAULT_YUV_WEIGHTS = YuvWeights()


@dataclass
class MetricReport:
    """Quality and rate numbers for one (reference, decoded, bitstream) triple."""

    d1_psnr: float
    d2_psnr: float
    y_psnr: float
    yuv_psnr: float
    bitrate_bpp: float
    plugin_scores: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("d1_psnr", "d2_psnr", "y_psnr", "yuv_psnr"):
            value = getattr(self, name)
            if not math.isnan(value) and value < 0:
                raise ValidationError(f"{name} must be non-negative, got {value}")
        if self.bitrate_bpp < 0:
            raise ValidationError("bitrate_bpp must be non-negative")


def rgb_to_ycbcr(colors: np.ndarray) -> np.ndarray:
    """BT.709 full-range RGB -> YCbCr, float64, no rounding or clipping."""
    rgb = np.asarray(colors, dtype=np.float64)
    y = _KR * rgb[:, 0] + _KG * rgb[:, 1] + _KB * rgb[:, 2]
    cb = (rgb[:, 2] - y) / (2.0 * (1.0 - _KB)) + 128.0
    cr = (rgb[:, 0] - y) / (2.0 * (1.0 - _KR)) + 128.0
    return np.column_stack([y, cb, cr])


def _psnr(peak_sq: float, mse: float) -> float:
    if mse == 0.0:
        return LOSSLESS
    return 10.0 * math.log10(peak_sq / mse)


def _geometry_peak_sq(reference: PointCloud) -> float:
    if reference.bit_depth is None:
        raise ConfigurationError("reference bit depth is required for PSNR")
    p = reference.peak_value
    return 3.0 * p * p


def d1_psnr(reference: PointCloud, decoded: PointCloud,
            ref_index: NeighborIndex | None = None,
            dec_index: NeighborIndex | None = None) -> float:
    """Point-to-point PSNR: symmetric max of per-direction mean squared
    nearest-neighbor distances against the 3*p^2 peak."""
    ref_index = ref_index or NeighborIndex(reference.positions)
    dec_index = dec_index or NeighborIndex(decoded.positions)
    _, sq_dr = ref_index.query(decoded.positions)
    _, sq_rd = dec_index.query(reference.positions)
    mse = max(float(np.mean(sq_dr)), float(np.mean(sq_rd)))
    return _psnr(_geometry_peak_sq(reference), mse)


def d2_psnr(reference: PointCloud, decoded: PointCloud, normals: NormalField,
            ref_index: NeighborIndex | None = None,
            dec_index: NeighborIndex | None = None) -> float:
    """Point-to-plane PSNR.

    Each matched displacement is projected onto the reference normal of
    the reference point in the match: the matched reference point when
    going decoded -> reference, the source reference point when going
    reference -> decoded.
    """
    if len(normals) != len(reference):
        raise SchemaError(
            f"normals cover {len(normals)} points but reference has {len(reference)}"
        )
    ref_index = ref_index or NeighborIndex(reference.positions)
    dec_index = dec_index or NeighborIndex(decoded.positions)

    idx_dr, _ = ref_index.query(decoded.positions)
    proj_dr = np.einsum("ij,ij->i", decoded.positions - reference.positions[idx_dr],
                        normals.vectors[idx_dr])
    idx_rd, _ = dec_index.query(reference.positions)
    proj_rd = np.einsum("ij,ij->i", reference.positions - decoded.positions[idx_rd],
                        normals.vectors)

    mse = max(float(np.mean(proj_dr ** 2)), float(np.mean(proj_rd ** 2)))
    return _psnr(_geometry_peak_sq(reference), mse)


def color_channel_psnrs(reference: PointCloud, decoded: PointCloud,
                        ref_index: NeighborIndex | None = None,
                        dec_index: NeighborIndex | None = None) -> tuple[float, float, float]:
    """Per-channel (Y, Cb, Cr) PSNR over nearest-neighbor color pairs."""
    ref_colors = rgb_to_ycbcr(reference.require_colors())
    dec_colors = rgb_to_ycbcr(decoded.require_colors())
    ref_index = ref_index or NeighborIndex(reference.positions)
    dec_index = dec_index or NeighborIndex(decoded.positions)

    idx_dr, _ = ref_index.query(decoded.positions)
    idx_rd, _ = dec_index.query(reference.positions)
    mse_dr = np.mean((dec_colors - ref_colors[idx_dr]) ** 2, axis=0)
    mse_rd = np.mean((ref_colors - dec_colors[idx_rd]) ** 2, axis=0)
    mse = np.maximum(mse_dr, mse_rd)
    return tuple(_psnr(255.0 ** 2, float(m)) for m in mse)


def color_psnr(reference: PointCloud, decoded: PointCloud,
               weights: YuvWeights = DEFAULT_YUV_WEIGHTS,
               ref_index: NeighborIndex | None = None,
               dec_index: NeighborIndex | None = None) -> tuple[float, float]:
    """(Y PSNR, weighted YUV PSNR). The YUV value averages channel PSNRs;
    zero-weight channels are excluded so degenerate weights stay finite."""
    y, u, v = color_channel_psnrs(reference, decoded, ref_index, dec_index)
    pairs = [(weights.wy, y), (weights.wu, u), (weights.wv, v)]
    total = sum(w for w, _ in pairs if w > 0)
    yuv = sum(w * p for w, p in pairs if w > 0) / total
    return y, yuv


def evaluate_triple(reference: PointCloud, decoded: PointCloud, bitstream_bytes: float,
                    weights: YuvWeights = DEFAULT_YUV_WEIGHTS,
                    normals: NormalField | None = None,
                    plugins: dict | None = None,
                    neighbor_k: int = 12) -> MetricReport:
    """All built-in metrics plus bitrate for one decoded stimulus.

    ``plugins`` maps score names to callables ``f(reference, decoded)``;
    externally computed joint metrics ride along in ``plugin_scores``.
    """
    if bitstream_bytes < 0:
        raise ValidationError("bitstream size must be non-negative")
    ref_index = NeighborIndex(reference.positions)
    dec_index = NeighborIndex(decoded.positions)
    if normals is None and len(reference) >= 4:
        normals = estimate_normals(reference, k=min(neighbor_k, len(reference) - 1))

    d1 = d1_psnr(reference, decoded, ref_index, dec_index)
    if normals is not None:
        d2 = d2_psnr(reference, decoded, normals, ref_index, dec_index)
    else:
        d2 = math.nan  # reference too small to estimate normals
    if reference.has_colors and decoded.has_colors:
        y, yuv = color_psnr(reference, decoded, weights, ref_index, dec_index)
    else:
        y = yuv = math.nan
    scores = {}
    for name, fn in (plugins or {}).items():
        scores[name] = float(fn(reference, decoded))
    return MetricReport(
        d1_psnr=d1, d2_psnr=d2, y_psnr=y, yuv_psnr=yuv,
        bitrate_bpp=8.0 * float(bitstream_bytes) / len(reference),
        plugin_scores=scores,
    )


def report_header(plugin_names: tuple[str, ...] = ()) -> str:
    cols = ["content", "codec", "rate", "strategy", "bpp",
            "d1_psnr", "d2_psnr", "y_psnr", "yuv_psnr", *plugin_names]
    return ",".join(cols)


def format_metric(value: float) -> str:
    if math.isnan(value):
        return ""
    if math.isinf(value):
        return "inf"
    return f"{value:.4f}"


def report_row(report: MetricReport, content: str = "", codec: str = "",
               rate: str = "", strategy: str = "",
               plugin_names: tuple[str, ...] = ()) -> str:
    cols = [content, codec, rate, strategy,
            format_metric(report.bitrate_bpp),
            format_metric(report.d1_psnr),
            format_metric(report.d2_psnr),
            format_metric(report.y_psnr),
            format_metric(report.yuv_psnr)]
    cols += [format_metric(report.plugin_scores.get(name, math.nan))
             for name in plugin_names]
    return ",".join(cols)
