"""Impairment-scale score handling: the subjects-by-stimuli matrix, MOS
with Student-t confidence intervals, and the raw CSV wire format."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DomainError, IntegrityError, SchemaError

SCALE = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class StimulusInfo:
    stimulus_id: str
    content: str = ""
    codec: str = ""
    rate: str = ""
    strategy: str = ""
    is_hidden_reference: bool = False


def parse_stimulus_id(stimulus_id: str) -> StimulusInfo:
    """Decode the ``<content>-<codec>_p<strategy>_r<rate>`` convention;
    ``<content>-ref`` marks a hidden reference."""
    head, _, tail = stimulus_id.rpartition("-")
    if head and tail == "ref":
        return StimulusInfo(stimulus_id, content=head, is_hidden_reference=True)
    parts = tail.split("_")
    if head and len(parts) == 3 and parts[1].startswith("p") and parts[2].startswith("r"):
        return StimulusInfo(stimulus_id, content=head, codec=parts[0],
                            strategy="P" + parts[1][1:], rate="R" + parts[2][1:])
    return StimulusInfo(stimulus_id)


@dataclass
class ScoreMatrix:
    """Subjects x stimuli integer scores with missing-entry support (NaN)."""

    scores: np.ndarray
    subject_ids: list[str]
    stimuli: list[StimulusInfo] = field(default_factory=list)

    def __post_init__(self):
        arr = np.asarray(self.scores, dtype=np.float64)
        if arr.ndim != 2:
            raise SchemaError(f"score matrix must be 2-D, got shape {arr.shape}")
        if arr.shape[0] != len(self.subject_ids):
            raise SchemaError("subject_ids length does not match matrix rows")
        present = arr[~np.isnan(arr)]
        if present.size and (np.any(present < 1) or np.any(present > 5)
                             or np.any(present != np.round(present))):
            raise SchemaError("scores must be integers in {1..5}")
        if not self.stimuli:
            self.stimuli = [StimulusInfo(f"stimulus_{j}") for j in range(arr.shape[1])]
        if len(self.stimuli) != arr.shape[1]:
            raise SchemaError("stimuli metadata length does not match matrix columns")
        self.scores = arr

    @property
    def n_subjects(self) -> int:
        return self.scores.shape[0]

    @property
    def n_stimuli(self) -> int:
        return self.scores.shape[1]

    def drop_subjects(self, subject_ids: set[str]) -> "ScoreMatrix":
        keep = [i for i, s in enumerate(self.subject_ids) if s not in subject_ids]
        return ScoreMatrix(self.scores[keep], [self.subject_ids[i] for i in keep],
                           list(self.stimuli))


@dataclass(frozen=True)
class MosEntry:
    stimulus: StimulusInfo
    mos: float
    ci: float  # t-based 95% half-width; NaN when undefined (single score)
    n: int


def mos_ci(matrix: ScoreMatrix) -> list[MosEntry]:
    """Mean opinion score and 95% CI half-width per stimulus.

    CI = t(0.975, n-1) * s / sqrt(n) with the sample standard deviation;
    a stimulus with a single score gets a NaN CI marker.
    """
    out = []
    for j, stim in enumerate(matrix.stimuli):
        col = matrix.scores[:, j]
        col = col[~np.isnan(col)]
        n = col.size
        if n == 0:
            raise DomainError(f"stimulus {stim.stimulus_id!r} has no scores")
        mean = float(np.mean(col))
        if n < 2:
            out.append(MosEntry(stim, mean, math.nan, n))
            continue
        sd = float(np.std(col, ddof=1))
        half = float(stats.t.ppf(0.975, n - 1)) * sd / math.sqrt(n)
        out.append(MosEntry(stim, mean, half, n))
    return out


def load_dsis_csv(text: str) -> ScoreMatrix:
    """Parse ``subject_id,stimulus_id,score`` rows into a matrix.

    Exact duplicates are tolerated (idempotent); a conflicting duplicate
    (same subject and stimulus, different score) is an integrity error.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header[:3]] != ["subject_id", "stimulus_id", "score"]:
        raise SchemaError("expected header subject_id,stimulus_id,score")
    seen: dict[tuple[str, str], int] = {}
    subjects: list[str] = []
    stimuli: list[str] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) < 3:
            raise SchemaError(f"line {lineno}: expected 3 columns, got {len(row)}")
        subject, stimulus, raw = row[0].strip(), row[1].strip(), row[2].strip()
        try:
            score = int(raw)
        except ValueError:
            raise SchemaError(f"line {lineno}: score {raw!r} is not an integer")
        if score not in SCALE:
            raise SchemaError(f"line {lineno}: score {score} outside 1..5")
        key = (subject, stimulus)
        if key in seen:
            if seen[key] != score:
                raise IntegrityError(
                    f"line {lineno}: conflicting duplicate score for {key}"
                )
            continue
        seen[key] = score
        if subject not in subjects:
            subjects.append(subject)
        if stimulus not in stimuli:
            stimuli.append(stimulus)
    arr = np.full((len(subjects), len(stimuli)), np.nan)
    s_index = {s: i for i, s in enumerate(subjects)}
    t_index = {t: j for j, t in enumerate(stimuli)}
    for (subject, stimulus), score in seen.items():
        arr[s_index[subject], t_index[stimulus]] = score
    return ScoreMatrix(arr, subjects, [parse_stimulus_id(t) for t in stimuli])


def dump_dsis_csv(rows: list[tuple[str, str, int]]) -> str:
    out = ["subject_id,stimulus_id,score"]
    out += [f"{subject},{stimulus},{score}" for subject, stimulus, score in rows]
    return "\n".join(out) + "\n"


def mos_table_csv(entries: list[MosEntry], include_hidden: bool = False) -> str:
    lines = ["stimulus_id,content,codec,rate,strategy,n,mos,ci95"]
    for e in entries:
        if e.stimulus.is_hidden_reference and not include_hidden:
            continue
        ci = "" if math.isnan(e.ci) else f"{e.ci:.4f}"
        s = e.stimulus
        lines.append(f"{s.stimulus_id},{s.content},{s.codec},{s.rate},{s.strategy},"
                     f"{e.n},{e.mos:.4f},{ci}")
    return "\n".join(lines) + "\n"
