import pytest

from pcqlab.ctc import RATES, STRATEGIES, jpeg_config_lookup
from pcqlab.errors import DomainError
from pcqlab.relations import ConfigRelation, config_relation

B = ConfigRelation.STRICTLY_BETTER
W = ConfigRelation.STRICTLY_WORSE
T = ConfigRelation.TRADE_OFF
E = ConfigRelation.EQUAL

# Expected relation for the ordered pairs (P1,P2), (P1,P3), (P2,P3) in each
# (content, rate) cell, frozen from a hand application of the dominance
# rule to the configuration catalog.
EXPECTED_RELATIONS = {
    ("Bouquet", "R1"): (T, T, W),
    ("Bouquet", "R2"): (T, T, W),
    ("Bouquet", "R3"): (B, T, W),
    ("Bouquet", "R4"): (W, T, B),
    ("StMichael", "R1"): (T, T, W),
    ("StMichael", "R2"): (T, T, T),
    ("StMichael", "R3"): (T, T, W),
    ("StMichael", "R4"): (W, T, B),
    ("Soldier", "R1"): (T, T, T),
    ("Soldier", "R2"): (B, T, T),
    ("Soldier", "R3"): (W, T, T),
    ("Soldier", "R4"): (W, T, B),
    ("Thaidancer", "R1"): (W, T, B),
    ("Thaidancer", "R2"): (W, B, B),
    ("Thaidancer", "R3"): (B, T, T),
    ("Thaidancer", "R4"): (T, T, T),
    ("Boxer", "R1"): (B, T, T),
    ("Boxer", "R2"): (B, T, T),
    ("Boxer", "R3"): (B, T, T),
    ("Boxer", "R4"): (T, T, T),
    ("House_without_roof", "R1"): (T, T, T),
    ("House_without_roof", "R2"): (B, T, W),
    ("House_without_roof", "R3"): (T, T, T),
    ("House_without_roof", "R4"): (W, T, B),
}

PAIR_ORDER = (("P1", "P2"), ("P1", "P3"), ("P2", "P3"))


def test_spec_examples():
    assert config_relation((0.01, 2, 0), (0.025, 2, 0)) == B
    assert config_relation((0.025, 2, 0), (0.05, 2, 1)) == T
    assert config_relation((0.05, 2, 1), (0.05, 2, 1)) == E


def test_lower_lambda_better_geometry_same_color():
    assert config_relation((0.005, 1, 2), (0.025, 1, 2)) == B


def test_lower_sf_better_geometry():
    assert config_relation((0.01, 2, 3), (0.01, 4, 3)) == B


def test_opposite_sf_lambda_is_incomparable_geometry():
    # better SF but worse lambda: a genuine trade-off even with equal color
    assert config_relation((0.05, 1, 3), (0.005, 2, 3)) == T


def test_dominance_on_both_axes():
    assert config_relation((0.005, 1, 4), (0.025, 2, 1)) == B
    assert config_relation((0.025, 2, 1), (0.005, 1, 4)) == W


def test_domain_validation():
    with pytest.raises(DomainError):
        config_relation((0.3, 1, 0), (0.05, 1, 0))
    with pytest.raises(DomainError):
        config_relation((0.05, 3, 0), (0.05, 1, 0))
    with pytest.raises(DomainError):
        config_relation((0.05, 1, 9), (0.05, 1, 0))


@pytest.mark.parametrize("content,rate", sorted(EXPECTED_RELATIONS))
def test_catalog_relations_match_frozen_expectations(content, rate):
    expected = EXPECTED_RELATIONS[(content, rate)]
    for (sa, sb), want in zip(PAIR_ORDER, expected):
        got = config_relation(jpeg_config_lookup(content, rate, sa),
                              jpeg_config_lookup(content, rate, sb))
        assert got == want, f"{content} {rate} {sa} vs {sb}"


def test_antisymmetry_over_whole_catalog():
    for content, rate in EXPECTED_RELATIONS:
        for sa, sb in PAIR_ORDER:
            a = jpeg_config_lookup(content, rate, sa)
            b = jpeg_config_lookup(content, rate, sb)
            assert config_relation(a, b) == config_relation(b, a).flipped()


def test_trade_off_pairs_never_dominate_either_way():
    for (content, rate), expected in EXPECTED_RELATIONS.items():
        for (sa, sb), want in zip(PAIR_ORDER, expected):
            if want is not T:
                continue
            a = jpeg_config_lookup(content, rate, sa)
            b = jpeg_config_lookup(content, rate, sb)
            assert config_relation(a, b) == T
            assert config_relation(b, a) == T
