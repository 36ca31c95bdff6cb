"""Durable session store for experiment sessions.

Votes are appended to a JSONL log and flushed before acknowledgment;
duplicate (subject, trial index) submissions are idempotent. Exports are
pure functions of the log, byte-stable given identical input order.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import asdict, dataclass
from pathlib import Path

from .errors import SchemaError, StateError, ValidationError
from .pairwise import Group, Vote, dump_votes_jsonl
from .plan import ExperimentPlan, PlanStimulus, Trial, legal_responses
from .scores import dump_dsis_csv

MIN_EXPOSURE_MS = 2_000


@dataclass(frozen=True)
class TrialRecord:
    session_id: str
    trial_index: int
    response: object  # int 1..5 for DSIS, left/right/not_sure for PWC
    elapsed_ms: float = 0.0
    timestamp: float = 0.0

    def __post_init__(self):
        if self.elapsed_ms < 0:
            raise ValidationError("response latency must be non-negative")


@dataclass(frozen=True)
class VoteAck:
    accepted: bool
    duplicate: bool
    flagged_short_exposure: bool


def _plan_to_dict(plan: ExperimentPlan) -> dict:
    return {
        "protocol": plan.protocol,
        "seed": plan.seed,
        "trials": [asdict(t) for t in plan.trials],
        "stimuli": {k: asdict(v) for k, v in plan.stimuli.items()},
    }


def _plan_from_dict(data: dict) -> ExperimentPlan:
    return ExperimentPlan(
        protocol=data["protocol"],
        seed=data["seed"],
        trials=[Trial(**t) for t in data["trials"]],
        stimuli={k: PlanStimulus(**v) for k, v in data["stimuli"].items()},
    )


class SessionStore:
    """One directory per experiment run: plans, lifecycle state, vote log."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._sessions_path = self.root / "sessions.json"
        self._votes_path = self.root / "votes.jsonl"
        self._sessions: dict[str, dict] = {}
        self._votes: list[dict] = []
        # appends are serialized; reads work on the in-memory snapshot
        self._write_lock = threading.Lock()
        self._load()

    def _load(self) -> None:
        if self._sessions_path.exists():
            raw = json.loads(self._sessions_path.read_text())
            self._sessions = raw
        if self._votes_path.exists():
            with open(self._votes_path) as fh:
                self._votes = [json.loads(line) for line in fh if line.strip()]

    def _save_sessions(self) -> None:
        tmp = self._sessions_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(self._sessions, indent=1, sort_keys=True))
        os.replace(tmp, self._sessions_path)

    # -- lifecycle ---------------------------------------------------------

    def create_session(self, session_id: str, plan: ExperimentPlan) -> None:
        if session_id in self._sessions:
            raise StateError(f"session {session_id!r} already exists")
        self._sessions[session_id] = {"plan": _plan_to_dict(plan), "open": True}
        self._save_sessions()

    def close_session(self, session_id: str) -> None:
        self._session(session_id)["open"] = False
        self._save_sessions()

    def is_open(self, session_id: str) -> bool:
        return bool(self._session(session_id)["open"])

    def session_ids(self) -> list[str]:
        return sorted(self._sessions)

    def plan(self, session_id: str) -> ExperimentPlan:
        return _plan_from_dict(self._session(session_id)["plan"])

    def _session(self, session_id: str) -> dict:
        session = self._sessions.get(session_id)
        if session is None:
            raise SchemaError(f"unknown session {session_id!r}")
        return session

    # -- voting ------------------------------------------------------------

    def votes(self, session_id: str | None = None) -> list[dict]:
        if session_id is None:
            return list(self._votes)
        return [v for v in self._votes if v["session_id"] == session_id]

    def next_trial(self, session_id: str) -> Trial | None:
        plan = self.plan(session_id)
        answered = {v["trial_index"] for v in self.votes(session_id)}
        for trial in plan.trials:
            if trial.index not in answered:
                return trial
        return None

    def submit_vote(self, record: TrialRecord) -> VoteAck:
        session = self._session(record.session_id)
        if not session["open"]:
            raise StateError(f"session {record.session_id!r} is closed")
        plan = self.plan(record.session_id)
        if not 0 <= record.trial_index < len(plan.trials):
            raise ValidationError(f"trial index {record.trial_index} out of range")
        legal = legal_responses(plan.protocol)
        if record.response not in legal:
            raise ValidationError(
                f"response {record.response!r} illegal for {plan.protocol}; "
                f"expected one of {legal}"
            )
        with self._write_lock:
            for vote in self._votes:
                if (vote["session_id"] == record.session_id
                        and vote["trial_index"] == record.trial_index):
                    return VoteAck(accepted=False, duplicate=True,
                                   flagged_short_exposure=bool(vote["flagged_short_exposure"]))
            flagged = record.elapsed_ms < MIN_EXPOSURE_MS
            entry = {
                "session_id": record.session_id,
                "trial_index": record.trial_index,
                "response": record.response,
                "elapsed_ms": record.elapsed_ms,
                "timestamp": record.timestamp,
                "flagged_short_exposure": flagged,
            }
            # Durability before acknowledgment: append, flush, fsync.
            with open(self._votes_path, "a") as fh:
                fh.write(json.dumps(entry) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._votes.append(entry)
        return VoteAck(accepted=True, duplicate=False, flagged_short_exposure=flagged)

    # -- export ------------------------------------------------------------

    def export(self, session_ids: list[str] | None = None) -> tuple[str, str]:
        """(DSIS CSV, PWC JSONL) for the closed sessions given (all by default)."""
        ids = session_ids if session_ids is not None else self.session_ids()
        for session_id in ids:
            if self.is_open(session_id):
                raise StateError(f"session {session_id!r} is still open")
        dsis_rows: list[tuple[str, str, int]] = []
        pwc_votes: list[Vote] = []
        for vote in self._votes:
            if vote["session_id"] not in ids:
                continue
            plan = self.plan(vote["session_id"])
            trial = plan.trials[vote["trial_index"]]
            if plan.protocol == "DSIS":
                distorted = self._distorted_stimulus(plan, trial)
                dsis_rows.append((vote["session_id"], distorted, int(vote["response"])))
            else:
                left_meta = plan.stimuli[trial.left]
                pwc_votes.append(Vote(
                    session=vote["session_id"],
                    group=Group(codec=left_meta.codec, rate=left_meta.rate,
                                content=left_meta.content),
                    left=trial.left, right=trial.right,
                    choice=str(vote["response"]),
                    elapsed_ms=float(vote["elapsed_ms"]),
                ))
        return dump_dsis_csv(dsis_rows), dump_votes_jsonl(pwc_votes)

    @staticmethod
    def _distorted_stimulus(plan: ExperimentPlan, trial: Trial) -> str:
        if trial.is_hidden_reference:
            return trial.left
        ref = trial.left if trial.reference_side == "left" else trial.right
        return trial.right if ref == trial.left else trial.left
