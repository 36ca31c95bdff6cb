"""Codec parameter tables and rate-allocation rules.

Holds the common-test-condition parameter ladders for the geometry-based
and video-based MPEG codecs, the per-strategy color qp assignments, the
per-content learning-based codec configurations, and the geometry-share
band rule used to classify those configurations into strategies.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError

GPCC_RATES = ("r01", "r02", "r03", "r04", "r05", "r06")
VPCC_RATES = ("r1", "r2", "r3", "r4", "r5")
RATES = ("R1", "R2", "R3", "R4")
STRATEGIES = ("P1", "P2", "P3")

# Subjective rate points map onto a CTC subset: R1..R4 are gpcc r02..r05
# and vpcc r1..r4.
GPCC_RATE_FOR = {"R1": "r02", "R2": "r03", "R3": "r04", "R4": "r05"}
VPCC_RATE_FOR = {"R1": "r1", "R2": "r2", "R3": "r3", "R4": "r4"}

_GPCC_PQS = {
    12: (0.03125, 0.0625, 0.125, 0.25, 0.5, 0.75),
    10: (0.125, 0.25, 0.5, 0.75, 0.875, 0.9375),
}
_GPCC_QP = (51, 46, 40, 34, 28, 22)

_VPCC_AQP = (42, 37, 32, 27, 22)
_VPCC_GQP = (32, 28, 24, 20, 16)
_VPCC_OCC = (4, 4, 4, 4, 2)

# Color qp per (strategy, rate); the P2/R4 cell depends on bit depth.
_GPCC_STRATEGY_QP = {
    "P1": {"R1": 46, "R2": 40, "R3": 34, "R4": 28},
    "P2": {"R1": 37, "R2": 34, "R3": 28, "R4": {12: 34, 10: 31}},
    "P3": {"R1": 28, "R2": 28, "R3": 22, "R4": 22},
}


def gpcc_ctc_params(rate: str, bit_depth: int) -> tuple[float, int]:
    """(pqs, qp) for a CTC rate point at a given voxelization precision."""
    if rate not in GPCC_RATES:
        raise DomainError(f"unknown rate {rate!r}; expected one of {GPCC_RATES}")
    if bit_depth not in _GPCC_PQS:
        raise DomainError(f"unsupported bit depth {bit_depth}; expected 10 or 12")
    i = GPCC_RATES.index(rate)
    return _GPCC_PQS[bit_depth][i], _GPCC_QP[i]


def next_pqs(pqs: float) -> float:
    """One step up the position-quantization ladder: double below 0.5,
    otherwise halve the distance to 1."""
    if not 0.0 < pqs < 1.0:
        raise DomainError(f"pqs must lie in (0, 1), got {pqs}")
    if pqs < 0.5:
        return 2.0 * pqs
    return 1.0 - (1.0 - pqs) / 2.0


def pqs_ladder(bit_depth: int) -> tuple[float, ...]:
    """Search candidates for bitrate matching: the CTC values plus the
    half-step midpoints of the ladder rule (sqrt-2 factor below 0.5,
    sqrt-2 shrink of the distance to 1 above), including one half step
    past the top value."""
    base = _GPCC_PQS.get(bit_depth)
    if base is None:
        raise DomainError(f"unsupported bit depth {bit_depth}; expected 10 or 12")
    half = 2.0 ** 0.5
    values = set(base)
    for v in base:
        if v < 0.5:
            values.add(v * half)
        else:
            values.add(1.0 - (1.0 - v) / half)
    return tuple(sorted(values))


def gpcc_strategy_qp(rate: str, strategy: str, bit_depth: int) -> int:
    """Color qp for one rate-allocation strategy at one rate point."""
    if rate not in RATES:
        raise DomainError(f"unknown rate {rate!r}; expected one of {RATES}")
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}")
    if bit_depth not in (10, 12):
        raise DomainError(f"unsupported bit depth {bit_depth}; expected 10 or 12")
    cell = _GPCC_STRATEGY_QP[strategy][rate]
    if isinstance(cell, dict):
        return cell[bit_depth]
    return cell


def vpcc_ctc_params(rate: str) -> tuple[int, int, int]:
    """(aqp, gqp, occupancyPrecision) for a CTC rate point."""
    if rate not in VPCC_RATES:
        raise DomainError(f"unknown rate {rate!r}; expected one of {VPCC_RATES}")
    i = VPCC_RATES.index(rate)
    return _VPCC_AQP[i], _VPCC_GQP[i], _VPCC_OCC[i]


@dataclass(frozen=True)
class VpccDirective:
    """Parameter directive for one strategy; ``gqp`` is None when it must
    be resolved by the isorate search."""

    aqp: int
    gqp: int | None
    occupancy_precision: int


def vpcc_strategy_params(rate: str, strategy: str) -> VpccDirective:
    if rate not in RATES:
        raise DomainError(f"unknown rate {rate!r}; expected one of {RATES}")
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}")
    aqp, gqp, occ = vpcc_ctc_params(VPCC_RATE_FOR[rate])
    if strategy == "P1":
        return VpccDirective(aqp=aqp, gqp=gqp, occupancy_precision=occ)
    if strategy == "P2":
        return VpccDirective(aqp=aqp + 5, gqp=None, occupancy_precision=4)
    return VpccDirective(aqp=aqp, gqp=None, occupancy_precision=2)


JPEG_LAMBDAS = (0.0025, 0.005, 0.01, 0.025, 0.05)
JPEG_SAMPLING_FACTORS = (1, 2, 4, 8)
JPEG_CRI_VALUES = (0, 1, 2, 3, 4)

# (lambda, sampling factor, color rate index) per content, rate, strategy.
_JPEG_CONFIGS = {
    "Bouquet": {
        "R1": {"P1": (0.05, 2, 1), "P2": (0.025, 2, 0), "P3": (0.01, 2, 0)},
        "R2": {"P1": (0.05, 1, 1), "P2": (0.025, 1, 0), "P3": (0.01, 1, 0)},
        "R3": {"P1": (0.005, 1, 3), "P2": (0.005, 1, 2), "P3": (0.0025, 1, 2)},
        "R4": {"P1": (0.005, 1, 4), "P2": (0.0025, 1, 4), "P3": (0.0025, 1, 3)},
    },
    "StMichael": {
        "R1": {"P1": (0.05, 2, 1), "P2": (0.025, 2, 0), "P3": (0.01, 2, 0)},
        "R2": {"P1": (0.05, 1, 2), "P2": (0.025, 1, 1), "P3": (0.01, 1, 0)},
        "R3": {"P1": (0.01, 1, 3), "P2": (0.005, 1, 2), "P3": (0.0025, 1, 2)},
        "R4": {"P1": (0.005, 1, 4), "P2": (0.0025, 1, 4), "P3": (0.0025, 1, 3)},
    },
    "Soldier": {
        "R1": {"P1": (0.01, 4, 3), "P2": (0.005, 4, 2), "P3": (0.025, 2, 0)},
        "R2": {"P1": (0.05, 1, 2), "P2": (0.05, 1, 1), "P3": (0.025, 1, 0)},
        "R3": {"P1": (0.025, 1, 3), "P2": (0.01, 1, 3), "P3": (0.005, 1, 2)},
        "R4": {"P1": (0.005, 1, 4), "P2": (0.0025, 1, 4), "P3": (0.0025, 1, 3)},
    },
    "Thaidancer": {
        "R1": {"P1": (0.05, 8, 1), "P2": (0.025, 8, 1), "P3": (0.025, 8, 0)},
        "R2": {"P1": (0.05, 4, 1), "P2": (0.025, 4, 1), "P3": (0.05, 4, 0)},
        "R3": {"P1": (0.025, 2, 2), "P2": (0.025, 2, 1), "P3": (0.01, 2, 0)},
        "R4": {"P1": (0.025, 1, 3), "P2": (0.01, 1, 2), "P3": (0.005, 1, 1)},
    },
    "Boxer": {
        "R1": {"P1": (0.05, 8, 2), "P2": (0.05, 8, 1), "P3": (0.025, 8, 0)},
        "R2": {"P1": (0.05, 4, 3), "P2": (0.05, 4, 2), "P3": (0.025, 4, 1)},
        "R3": {"P1": (0.05, 2, 3), "P2": (0.05, 2, 2), "P3": (0.025, 2, 1)},
        "R4": {"P1": (0.05, 1, 3), "P2": (0.005, 2, 4), "P3": (0.0025, 2, 3)},
    },
    "House_without_roof": {
        "R1": {"P1": (0.05, 8, 2), "P2": (0.025, 8, 1), "P3": (0.01, 8, 0)},
        "R2": {"P1": (0.025, 4, 2), "P2": (0.025, 4, 1), "P3": (0.01, 4, 1)},
        "R3": {"P1": (0.025, 2, 3), "P2": (0.01, 2, 2), "P3": (0.005, 2, 1)},
        "R4": {"P1": (0.01, 1, 3), "P2": (0.005, 1, 3), "P3": (0.005, 1, 2)},
    },
}

JPEG_CONTENTS = tuple(_JPEG_CONFIGS)


def jpeg_config_lookup(content: str, rate: str, strategy: str) -> tuple[float, int, int]:
    """(lambda, SF, CRI) used to compress one content at one rate/strategy."""
    table = _JPEG_CONFIGS.get(content)
    if table is None:
        raise DomainError(f"unknown content {content!r}; expected one of {JPEG_CONTENTS}")
    if rate not in RATES:
        raise DomainError(f"unknown rate {rate!r}; expected one of {RATES}")
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}")
    return table[rate][strategy]


def classify_pg(geometry_bytes: float, total_bytes: float) -> str:
    """Strategy band from the geometry share of the bitstream.

    pg <= 0.4 -> P1, 0.4 < pg <= 0.6 -> P2, pg > 0.6 -> P3; exact band
    boundaries resolve to the lower band.
    """
    if total_bytes <= 0:
        raise DomainError("total size must be positive")
    if not 0 < geometry_bytes <= total_bytes:
        raise DomainError(
            f"geometry size must lie in (0, total], got {geometry_bytes} of {total_bytes}"
        )
    pg = geometry_bytes / total_bytes
    if pg <= 0.4:
        return "P1"
    if pg <= 0.6:
        return "P2"
    return "P3"
