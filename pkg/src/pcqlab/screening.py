"""Subject outlier screening for impairment-scale scores.

Classical screening: per stimulus, scores outside mean +/- 2 sigma (or
mean +/- sqrt(20) sigma when the kurtosis coefficient leaves [2, 4]) are
counted per subject as P (above) and Q (below); a subject is rejected
when (P+Q)/N > 0.05 and |P-Q|/(P+Q) < 0.3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .scores import ScoreMatrix


@dataclass(frozen=True)
class SubjectScreen:
    subject_id: str
    p: int
    q: int
    n_ratings: int
    rejected: bool


def _stimulus_bounds(column: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(column))
    sigma = float(np.std(column, ddof=0))
    if sigma == 0.0:
        return mean, mean
    m2 = float(np.mean((column - mean) ** 2))
    m4 = float(np.mean((column - mean) ** 4))
    beta2 = m4 / (m2 * m2)
    width = 2.0 * sigma if 2.0 <= beta2 <= 4.0 else np.sqrt(20.0) * sigma
    return mean - width, mean + width


def screen_subjects(matrix: ScoreMatrix) -> list[SubjectScreen]:
    """Per-subject screening counters and verdicts."""
    if matrix.n_subjects < 3:
        raise DomainError("screening needs at least 3 subjects")
    bounds = []
    for j in range(matrix.n_stimuli):
        col = matrix.scores[:, j]
        col = col[~np.isnan(col)]
        if col.size == 0:
            raise DomainError(f"stimulus column {j} has no scores")
        bounds.append(_stimulus_bounds(col))

    results = []
    for i, subject in enumerate(matrix.subject_ids):
        p = q = n = 0
        for j, (lo, hi) in enumerate(bounds):
            score = matrix.scores[i, j]
            if np.isnan(score):
                continue
            n += 1
            if score > hi:
                p += 1
            elif score < lo:
                q += 1
        rejected = False
        if n > 0 and p + q > 0:
            rejected = (p + q) / n > 0.05 and abs(p - q) / (p + q) < 0.3
        results.append(SubjectScreen(subject, p, q, n, rejected))
    return results


def screen_outliers(matrix: ScoreMatrix) -> tuple[ScoreMatrix, list[str]]:
    """Drop rejected subjects; returns the cleaned matrix and their ids."""
    rejected = [r.subject_id for r in screen_subjects(matrix) if r.rejected]
    if not rejected:
        return matrix, []
    return matrix.drop_subjects(set(rejected)), rejected
