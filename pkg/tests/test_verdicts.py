import math

import numpy as np
import pytest
from scipy import stats

from pcqlab.errors import DomainError, IntegrityError, SchemaError
from pcqlab.relations import ConfigRelation
from pcqlab.verdicts import (assemble_diagram, jod_superior, relation_verdict,
                             welch_one_tailed_p, welch_superior)


def test_identical_lists_no_evidence():
    verdict = welch_superior([4, 4, 5, 5], [4, 4, 5, 5])
    assert verdict.winner is None


def test_near_degenerate_separation_is_decisive():
    a = [5.0, 5.0 - 1e-6, 5.0, 5.0 + 1e-6, 5.0]
    b = [1.0, 1.0 + 1e-6, 1.0, 1.0 - 1e-6, 1.0]
    verdict = welch_superior(a, b)
    assert verdict.winner == "a"
    assert verdict.statistic < 1e-6


def test_mirrored_samples_give_half_p():
    verdict = welch_superior([4, 5, 4, 5], [4, 4, 5, 5])
    assert verdict.winner is None
    assert verdict.statistic == pytest.approx(0.5, abs=1e-9)


def test_welch_matches_scipy_one_tailed():
    rng = np.random.default_rng(5)
    a = rng.integers(1, 6, size=14).astype(float)
    b = rng.integers(1, 6, size=17).astype(float)
    expected = stats.ttest_ind(a, b, equal_var=False, alternative="greater").pvalue
    assert welch_one_tailed_p(a, b) == pytest.approx(float(expected), rel=1e-12)


def test_direction_flips_when_arguments_swap():
    a = [5, 5, 4, 5, 5]
    b = [2, 1, 2, 1, 2]
    forward = welch_superior(a, b, label_a="x", label_b="y")
    backward = welch_superior(b, a, label_a="y", label_b="x")
    assert forward.winner == "x"
    assert backward.winner == "x"


def test_one_tailed_pvalues_sum_to_one():
    rng = np.random.default_rng(11)
    for _ in range(10):
        a = rng.normal(3, 1, size=9)
        b = rng.normal(3.4, 1.3, size=12)
        total = welch_one_tailed_p(a, b) + welch_one_tailed_p(b, a)
        assert total == pytest.approx(1.0, abs=1e-12)


def test_zero_variance_equal_means_degenerate():
    verdict = welch_superior([3, 3, 3], [3, 3, 3])
    assert verdict.winner is None


def test_zero_variance_distinct_means():
    verdict = welch_superior([5, 5, 5], [2, 2, 2])
    assert verdict.winner == "a"


def test_welch_needs_two_scores():
    with pytest.raises(DomainError):
        welch_superior([4], [3, 4])


def test_jod_threshold_boundary_inclusive():
    assert jod_superior(1.2, 0.0).winner == "a"
    assert jod_superior(0.99, 0.0).winner is None
    assert jod_superior(0.0, 1.0).winner == "b"


def test_jod_cross_group_rejected():
    with pytest.raises(SchemaError):
        jod_superior(1.0, 0.0, group_a="gpcc/R1", group_b="gpcc/R2")


def test_jod_never_both_directions():
    for delta in (-2.0, -1.0, -0.3, 0.0, 0.3, 1.0, 2.0):
        forward = jod_superior(delta, 0.0)
        backward = jod_superior(0.0, delta)
        assert not (forward.winner == "a" and backward.winner == "a")
        if forward.winner == "a":
            assert backward.winner == "b"


def test_relation_verdict_mapping():
    assert relation_verdict("x", "y", ConfigRelation.STRICTLY_BETTER).winner == "x"
    assert relation_verdict("x", "y", ConfigRelation.STRICTLY_WORSE).winner == "y"
    assert relation_verdict("x", "y", ConfigRelation.TRADE_OFF).winner is None
    assert relation_verdict("x", "y", ConfigRelation.EQUAL).winner is None


def cell_key():
    return ("Soldier", "gpcc", "R1")


def test_assemble_diagram_unions_sources():
    verdicts = [
        welch_superior([5, 5, 5, 4], [1, 2, 1, 1], label_a="p1", label_b="p2"),
        jod_superior(1.4, 0.0, label_a="p1", label_b="p2"),
        jod_superior(0.2, 0.0, label_a="p1", label_b="p3"),
    ]
    rows = assemble_diagram({cell_key(): verdicts})
    assert len(rows) == 1
    edges = rows[0].edges
    assert len(edges) == 3
    solid = [e for e in edges if not e["dotted"]]
    assert {(e["source"], e["winner"]) for e in solid} == {("DSIS", "p1"), ("PWC", "p1")}
    dotted = [e for e in edges if e["dotted"]]
    assert dotted[0]["pair"] == ["p1", "p3"]


def test_assemble_diagram_all_no_evidence_is_three_dotted():
    verdicts = [jod_superior(0.0, 0.1, label_a=a, label_b=b)
                for a, b in (("p1", "p2"), ("p1", "p3"), ("p2", "p3"))]
    rows = assemble_diagram({cell_key(): verdicts})
    assert all(e["dotted"] for e in rows[0].edges)
    assert len(rows[0].edges) == 3


def test_assemble_diagram_conflicting_source_is_integrity_error():
    a = jod_superior(1.5, 0.0, label_a="p1", label_b="p2")
    b = jod_superior(0.0, 1.5, label_a="p1", label_b="p2")
    with pytest.raises(IntegrityError):
        assemble_diagram({cell_key(): [a, b]})


def test_assemble_diagram_row_is_json_ready():
    rows = assemble_diagram({cell_key(): [jod_superior(1.5, 0.0, label_a="p1",
                                                       label_b="p2")]})
    as_dict = rows[0].as_dict()
    assert as_dict["content"] == "Soldier"
    assert as_dict["edges"][0]["winner"] == "p1"
    assert not math.isnan(float(as_dict["rate"] == "R1"))
