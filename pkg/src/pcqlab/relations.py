"""Quality ordering between learning-based codec configurations.

Geometry quality is a partial order on (sampling factor, lambda), both
lower-better; configurations whose two components disagree are
incomparable. Color quality is totally ordered by the color rate index
(higher is better). A configuration strictly dominates another only when
it is at least as good on both axes, strictly better on one, and neither
axis is incomparable.
"""

from __future__ import annotations

from enum import Enum

from .errors import DomainError
from .ctc import JPEG_CRI_VALUES, JPEG_LAMBDAS, JPEG_SAMPLING_FACTORS


class ConfigRelation(Enum):
    STRICTLY_BETTER = "StrictlyBetter"
    STRICTLY_WORSE = "StrictlyWorse"
    TRADE_OFF = "TradeOff"
    EQUAL = "Equal"

    def flipped(self) -> "ConfigRelation":
        if self is ConfigRelation.STRICTLY_BETTER:
            return ConfigRelation.STRICTLY_WORSE
        if self is ConfigRelation.STRICTLY_WORSE:
            return ConfigRelation.STRICTLY_BETTER
        return self


_A_BETTER, _B_BETTER, _SAME, _MIXED = range(4)


def _check(config) -> tuple[float, int, int]:
    lam, sf, cri = config
    if lam not in JPEG_LAMBDAS:
        raise DomainError(f"lambda {lam!r} not in {JPEG_LAMBDAS}")
    if sf not in JPEG_SAMPLING_FACTORS:
        raise DomainError(f"sampling factor {sf!r} not in {JPEG_SAMPLING_FACTORS}")
    if cri not in JPEG_CRI_VALUES:
        raise DomainError(f"color rate index {cri!r} not in {JPEG_CRI_VALUES}")
    return lam, sf, cri


def _geometry_order(a, b) -> int:
    (lam_a, sf_a, _), (lam_b, sf_b, _) = a, b
    # Product order with both components lower-better.
    sf_cmp = (sf_a < sf_b) - (sf_a > sf_b)
    lam_cmp = (lam_a < lam_b) - (lam_a > lam_b)
    if sf_cmp == 0 and lam_cmp == 0:
        return _SAME
    if sf_cmp >= 0 and lam_cmp >= 0:
        return _A_BETTER
    if sf_cmp <= 0 and lam_cmp <= 0:
        return _B_BETTER
    return _MIXED


def _color_order(a, b) -> int:
    cri_a, cri_b = a[2], b[2]
    if cri_a == cri_b:
        return _SAME
    return _A_BETTER if cri_a > cri_b else _B_BETTER


def config_relation(a, b) -> ConfigRelation:
    """Relate two (lambda, SF, CRI) configurations."""
    a = _check(a)
    b = _check(b)
    geo = _geometry_order(a, b)
    col = _color_order(a, b)
    if geo == _MIXED:
        return ConfigRelation.TRADE_OFF
    if geo == _SAME and col == _SAME:
        return ConfigRelation.EQUAL
    if geo in (_SAME, _A_BETTER) and col in (_SAME, _A_BETTER):
        return ConfigRelation.STRICTLY_BETTER
    if geo in (_SAME, _B_BETTER) and col in (_SAME, _B_BETTER):
        return ConfigRelation.STRICTLY_WORSE
    return ConfigRelation.TRADE_OFF
