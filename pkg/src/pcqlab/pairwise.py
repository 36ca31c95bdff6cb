"""Pairwise-comparison vote logs and preference tallies.

Comparisons only exist within one (codec, rate, content) group. Tally
counts start at 0.1 for every ordered compared pair (the zero-frequency
correction), a preference adds 1 to the winner's direction, and a
Not-Sure vote adds 0.5 to both directions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError

CHOICES = ("left", "right", "not_sure")
PAIR_INIT = 0.1
NOT_SURE_SPLIT = 0.5


@dataclass(frozen=True)
class Group:
    codec: str
    rate: str
    content: str

    def as_dict(self) -> dict:
        return {"codec": self.codec, "rate": self.rate, "content": self.content}


@dataclass(frozen=True)
class Vote:
    session: str
    group: Group
    left: str
    right: str
    choice: str
    elapsed_ms: float = 0.0

    def __post_init__(self):
        if self.choice not in CHOICES:
            raise SchemaError(f"illegal choice {self.choice!r}; expected one of {CHOICES}")
        if self.left == self.right:
            raise SchemaError(f"vote pairs identical stimulus {self.left!r} with itself")

    @property
    def pair(self) -> tuple[str, str]:
        return tuple(sorted((self.left, self.right)))

    @property
    def winner(self) -> str | None:
        if self.choice == "left":
            return self.left
        if self.choice == "right":
            return self.right
        return None


def vote_to_json(vote: Vote) -> str:
    return json.dumps({
        "session": vote.session,
        "group": vote.group.as_dict(),
        "left": vote.left,
        "right": vote.right,
        "choice": vote.choice,
        "elapsed_ms": vote.elapsed_ms,
    })


def vote_from_json(line: str, lineno: int | None = None) -> Vote:
    where = f"line {lineno}: " if lineno is not None else ""
    try:
        data = json.loads(line)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{where}invalid JSON ({exc})")
    try:
        group = Group(**data["group"])
        return Vote(session=str(data["session"]), group=group,
                    left=str(data["left"]), right=str(data["right"]),
                    choice=str(data["choice"]),
                    elapsed_ms=float(data.get("elapsed_ms", 0.0)))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"{where}vote record missing field ({exc})")


def load_votes_jsonl(text: str) -> list[Vote]:
    votes = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.strip():
            votes.append(vote_from_json(line, lineno))
    return votes


def dump_votes_jsonl(votes: list[Vote]) -> str:
    return "".join(vote_to_json(v) + "\n" for v in votes)


def group_votes(votes: list[Vote]) -> dict[Group, list[Vote]]:
    grouped: dict[Group, list[Vote]] = {}
    for vote in votes:
        grouped.setdefault(vote.group, []).append(vote)
    return grouped


@dataclass
class PairwiseTally:
    """Directed preference weights for one comparison group."""

    group: Group
    stimuli: list[str]
    counts: np.ndarray
    not_sure_count: dict[tuple[str, str], int]
    votes: list[Vote] = field(default_factory=list)

    def index(self, stimulus: str) -> int:
        try:
            return self.stimuli.index(stimulus)
        except ValueError:
            raise SchemaError(f"stimulus {stimulus!r} not in group {self.group}")

    def weight(self, a: str, b: str) -> float:
        return float(self.counts[self.index(a), self.index(b)])

    @property
    def compared_pairs(self) -> list[tuple[str, str]]:
        pairs = []
        n = len(self.stimuli)
        for i in range(n):
            for j in range(i + 1, n):
                if self.counts[i, j] > 0 or self.counts[j, i] > 0:
                    pairs.append((self.stimuli[i], self.stimuli[j]))
        return pairs

    @property
    def subjects(self) -> list[str]:
        seen: list[str] = []
        for vote in self.votes:
            if vote.session not in seen:
                seen.append(vote.session)
        return seen


def build_tally(votes: list[Vote], pairs: list[tuple[str, str]] | None = None,
                group: Group | None = None) -> PairwiseTally:
    """Accumulate one group's votes into a preference matrix.

    ``pairs`` may list the scheduled comparisons explicitly so pairs that
    collected no votes still receive the 0.1 initialization. All votes
    must belong to a single group.
    """
    if not votes and group is None:
        raise SchemaError("cannot build a tally without votes or an explicit group")
    if votes:
        inferred = votes[0].group
        for vote in votes:
            if vote.group != inferred:
                raise SchemaError(
                    f"vote for group {vote.group} mixed into group {inferred}"
                )
        if group is not None and group != inferred:
            raise SchemaError(f"votes belong to {inferred}, not {group}")
        group = inferred

    pair_set: list[tuple[str, str]] = []
    seen_pairs = set()
    for pair in (pairs or []):
        key = tuple(sorted(pair))
        if key not in seen_pairs:
            seen_pairs.add(key)
            pair_set.append(key)
    for vote in votes:
        if vote.pair not in seen_pairs:
            seen_pairs.add(vote.pair)
            pair_set.append(vote.pair)

    stimuli: list[str] = []
    for a, b in pair_set:
        for s in (a, b):
            if s not in stimuli:
                stimuli.append(s)

    n = len(stimuli)
    counts = np.zeros((n, n))
    index = {s: i for i, s in enumerate(stimuli)}
    for a, b in pair_set:
        counts[index[a], index[b]] = PAIR_INIT
        counts[index[b], index[a]] = PAIR_INIT

    not_sure: dict[tuple[str, str], int] = {p: 0 for p in pair_set}
    for vote in votes:
        i, j = index[vote.left], index[vote.right]
        if vote.choice == "not_sure":
            counts[i, j] += NOT_SURE_SPLIT
            counts[j, i] += NOT_SURE_SPLIT
            not_sure[vote.pair] += 1
        else:
            w = index[vote.winner]
            loser = j if w == i else i
            counts[w, loser] += 1.0

    return PairwiseTally(group=group, stimuli=stimuli, counts=counts,
                         not_sure_count=not_sure, votes=list(votes))


def not_sure_profile(votes: list[Vote]) -> dict[str, float]:
    """Proportion of Not-Sure answers per rate."""
    totals: dict[str, int] = {}
    unsure: dict[str, int] = {}
    for vote in votes:
        rate = vote.group.rate
        totals[rate] = totals.get(rate, 0) + 1
        if vote.choice == "not_sure":
            unsure[rate] = unsure.get(rate, 0) + 1
    return {rate: unsure.get(rate, 0) / totals[rate] for rate in sorted(totals)}
