"""Superiority verdicts between rate-allocation strategies and the
per-cell diagram rows that combine them.

Impairment scores are compared with a one-tailed Welch t-test (p < 0.05);
pairwise scales with a threshold of at least 1 JOD; configuration
dominance rides along as a third evidence source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DomainError, IntegrityError, SchemaError
from .relations import ConfigRelation

SOURCES = ("DSIS", "PWC", "ConfigRelation")


@dataclass(frozen=True)
class SuperiorityVerdict:
    a: str
    b: str
    source: str
    winner: str | None  # one of a/b, or None for no evidence
    statistic: float = math.nan

    def __post_init__(self):
        if self.source not in SOURCES:
            raise SchemaError(f"unknown verdict source {self.source!r}")
        if self.winner is not None and self.winner not in (self.a, self.b):
            raise SchemaError(f"winner {self.winner!r} is not one of the pair")

    @property
    def pair(self) -> tuple[str, str]:
        return tuple(sorted((self.a, self.b)))


def welch_superior(a, b, alpha: float = 0.05,
                   label_a: str = "a", label_b: str = "b") -> SuperiorityVerdict:
    """One-tailed Welch test: does one score population have the higher mean?

    Returns the direction only when the one-tailed p-value beats alpha.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise DomainError("each score list needs at least 2 entries")
    mean_a, mean_b = float(np.mean(a)), float(np.mean(b))
    var_a, var_b = float(np.var(a, ddof=1)), float(np.var(b, ddof=1))
    se_sq = var_a / a.size + var_b / b.size
    if se_sq == 0.0:
        if mean_a == mean_b:
            return SuperiorityVerdict(label_a, label_b, "DSIS", None, 0.5)
        winner = label_a if mean_a > mean_b else label_b
        return SuperiorityVerdict(label_a, label_b, "DSIS", winner, 0.0)
    t = (mean_a - mean_b) / math.sqrt(se_sq)
    df = se_sq ** 2 / (
        (var_a / a.size) ** 2 / (a.size - 1) + (var_b / b.size) ** 2 / (b.size - 1)
    )
    p_one = float(stats.t.sf(abs(t), df))
    if p_one < alpha and t != 0.0:
        winner = label_a if t > 0 else label_b
        return SuperiorityVerdict(label_a, label_b, "DSIS", winner, p_one)
    return SuperiorityVerdict(label_a, label_b, "DSIS", None, p_one)


def welch_one_tailed_p(a, b) -> float:
    """p-value for the specific hypothesis mean(a) > mean(b)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    var_a, var_b = float(np.var(a, ddof=1)), float(np.var(b, ddof=1))
    se_sq = var_a / a.size + var_b / b.size
    if se_sq == 0.0:
        mean_a, mean_b = float(np.mean(a)), float(np.mean(b))
        return 0.5 if mean_a == mean_b else (0.0 if mean_a > mean_b else 1.0)
    t = (float(np.mean(a)) - float(np.mean(b))) / math.sqrt(se_sq)
    df = se_sq ** 2 / (
        (var_a / a.size) ** 2 / (a.size - 1) + (var_b / b.size) ** 2 / (b.size - 1)
    )
    return float(stats.t.sf(t, df))


def jod_superior(jod_a: float, jod_b: float, threshold: float = 1.0,
                 label_a: str = "a", label_b: str = "b",
                 group_a=None, group_b=None) -> SuperiorityVerdict:
    """Direction when the scale difference reaches the threshold
    (boundary inclusive); scales from different groups cannot be compared."""
    if group_a != group_b:
        raise SchemaError(
            f"cannot compare scale values across groups {group_a!r} and {group_b!r}"
        )
    delta = jod_a - jod_b
    if abs(delta) >= threshold:
        winner = label_a if delta > 0 else label_b
        return SuperiorityVerdict(label_a, label_b, "PWC", winner, delta)
    return SuperiorityVerdict(label_a, label_b, "PWC", None, delta)


def relation_verdict(a: str, b: str, relation: ConfigRelation) -> SuperiorityVerdict:
    winner = None
    if relation is ConfigRelation.STRICTLY_BETTER:
        winner = a
    elif relation is ConfigRelation.STRICTLY_WORSE:
        winner = b
    return SuperiorityVerdict(a, b, "ConfigRelation", winner)


@dataclass
class DiagramCell:
    content: str
    codec: str
    rate: str
    edges: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"content": self.content, "codec": self.codec, "rate": self.rate,
                "edges": self.edges}


def assemble_diagram(cells: dict[tuple[str, str, str], list[SuperiorityVerdict]]) -> list[DiagramCell]:
    """Merge per-source verdicts into one diagram row per
    (content, codec, rate) cell.

    Every pair emits one edge per evidence source; no-evidence edges are
    kept explicitly (dotted). Two verdicts from one source that disagree
    on direction for the same pair indicate corrupted upstream data.
    """
    rows = []
    for (content, codec, rate), verdicts in sorted(cells.items()):
        seen: dict[tuple[tuple[str, str], str], SuperiorityVerdict] = {}
        for verdict in verdicts:
            key = (verdict.pair, verdict.source)
            if key in seen and seen[key].winner != verdict.winner:
                raise IntegrityError(
                    f"conflicting {verdict.source} verdicts for pair {verdict.pair} "
                    f"in cell {(content, codec, rate)}"
                )
            seen[key] = verdict
        edges = []
        for (pair, source), verdict in sorted(seen.items()):
            edges.append({
                "pair": list(pair),
                "source": source,
                "winner": verdict.winner,
                "dotted": verdict.winner is None,
            })
        rows.append(DiagramCell(content=content, codec=codec, rate=rate, edges=edges))
    return rows
