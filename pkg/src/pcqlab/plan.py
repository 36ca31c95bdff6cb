"""Randomized experiment playlists.

The server owns randomization: playlists are deterministic functions of
(protocol, stimulus set, seed), trial order never repeats a content in
two consecutive trials, and the left/right placement of each trial is an
independent fair coin.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError

PROTOCOLS = ("DSIS", "PWC")
DSIS_RESPONSES = (1, 2, 3, 4, 5)
PWC_RESPONSES = ("left", "right", "not_sure")
INSPECTION_MS = 12_000
DSIS_HOLD_MS = 1_000


@dataclass(frozen=True)
class PlanStimulus:
    stimulus_id: str
    content: str
    codec: str = ""
    rate: str = ""
    strategy: str = ""
    is_reference: bool = False
    asset: str = ""
    point_size: float = 1.0
    bit_depth: int = 10


@dataclass(frozen=True)
class Trial:
    index: int
    content: str
    left: str
    right: str
    protocol: str
    is_hidden_reference: bool = False
    reference_side: str | None = None  # DSIS: disclosed side of the reference
    time_budget_ms: int = INSPECTION_MS

    @property
    def pair(self) -> tuple[str, str]:
        return tuple(sorted((self.left, self.right)))


@dataclass
class ExperimentPlan:
    protocol: str
    seed: int
    trials: list[Trial]
    stimuli: dict[str, PlanStimulus] = field(default_factory=dict)

    def part(self, index: int, parts: int = 2) -> list[Trial]:
        """Round-robin split into consecutive-day parts; strata stay
        balanced because trials alternate between parts."""
        return [t for i, t in enumerate(self.trials) if i % parts == index]


def _check_metadata(stimuli: list[PlanStimulus], protocol: str) -> None:
    seen = set()
    for s in stimuli:
        if not s.stimulus_id or not s.content:
            raise SchemaError(f"stimulus {s!r} lacks an id or content")
        if s.stimulus_id in seen:
            raise SchemaError(f"duplicate stimulus id {s.stimulus_id!r}")
        seen.add(s.stimulus_id)
        if not s.is_reference and (not s.codec or not s.rate or not s.strategy):
            raise SchemaError(
                f"distorted stimulus {s.stimulus_id!r} lacks codec/rate/strategy metadata"
            )
    if protocol == "DSIS":
        contents = {s.content for s in stimuli if not s.is_reference}
        refs = {s.content for s in stimuli if s.is_reference}
        missing = contents - refs
        if missing:
            raise SchemaError(f"no reference stimulus for contents {sorted(missing)}")


def _order_without_content_repeats(items: list, contents: list[str],
                                   rng: np.random.Generator) -> list:
    """Random order with no two consecutive items of the same content.

    Greedy with a feasibility guard: when one content holds at least half
    of what remains, it must be drained first or the constraint becomes
    unsatisfiable.
    """
    remaining: dict[str, list] = {}
    for item, content in zip(items, contents):
        remaining.setdefault(content, []).append(item)
    for bucket in remaining.values():
        perm = rng.permutation(len(bucket))
        bucket[:] = [bucket[i] for i in perm]

    ordered = []
    previous = None
    total = len(items)
    while total:
        candidates = [c for c in remaining if c != previous]
        if not candidates:
            # Only the previous content remains (single-content stimulus
            # sets make the no-repeat rule unsatisfiable): accept repeats.
            candidates = list(remaining)
        forced = [c for c in candidates if 2 * len(remaining[c]) >= total + 1]
        pool = forced if forced else candidates
        pool = sorted(pool)
        content = pool[int(rng.integers(0, len(pool)))]
        ordered.append(remaining[content].pop())
        if not remaining[content]:
            del remaining[content]
        previous = content
        total -= 1
    return ordered


def generate_plan(protocol: str, stimuli: list[PlanStimulus], seed: int) -> ExperimentPlan:
    """Build one subject's randomized playlist.

    DSIS: one trial per distorted stimulus (reference vs distorted, side
    randomized and disclosed) plus one hidden-reference trial per content.
    PWC: one trial per unordered strategy pair within each
    (content, codec, rate) group; only same-codec same-rate stimuli are
    ever paired.
    """
    if protocol not in PROTOCOLS:
        raise SchemaError(f"unknown protocol {protocol!r}; expected one of {PROTOCOLS}")
    _check_metadata(stimuli, protocol)
    rng = np.random.default_rng(seed)
    by_id = {s.stimulus_id: s for s in stimuli}

    specs: list[tuple[str, str, str, bool]] = []  # (content, a, b, hidden)
    if protocol == "DSIS":
        references = {s.content: s for s in stimuli if s.is_reference}
        for s in stimuli:
            if not s.is_reference:
                specs.append((s.content, references[s.content].stimulus_id,
                              s.stimulus_id, False))
        for content in sorted(references):
            ref = references[content].stimulus_id
            specs.append((content, ref, ref, True))
    else:
        groups: dict[tuple[str, str, str], list[str]] = {}
        for s in stimuli:
            if s.is_reference:
                continue
            groups.setdefault((s.content, s.codec, s.rate), []).append(s.stimulus_id)
        for key in sorted(groups):
            members = sorted(groups[key])
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    specs.append((key[0], members[i], members[j], False))

    ordered = _order_without_content_repeats(specs, [s[0] for s in specs], rng)

    trials = []
    for index, (content, a, b, hidden) in enumerate(ordered):
        swap = bool(rng.integers(0, 2))
        left, right = (b, a) if swap else (a, b)
        reference_side = None
        if protocol == "DSIS":
            ref_id = a  # spec position before the coin flip
            reference_side = "left" if left == ref_id else "right"
            if hidden:
                reference_side = "left" if not swap else "right"
        trials.append(Trial(
            index=index, content=content, left=left, right=right,
            protocol=protocol, is_hidden_reference=hidden,
            reference_side=reference_side,
        ))
    return ExperimentPlan(protocol=protocol, seed=seed, trials=trials, stimuli=by_id)


def legal_responses(protocol: str) -> tuple:
    return DSIS_RESPONSES if protocol == "DSIS" else PWC_RESPONSES
