"""Run provenance records and their canonical serialization."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field


class WrongState(Exception):
    def __init__(self, run_id: str, status: str, wanted: str):
        self.run_id = run_id
        self.status = status
        self.wanted = wanted
        super().__init__(f"run {run_id} is '{status}', operation needs '{wanted}'")


STATUSES = ("generating", "training", "awaiting_feedback", "done", "failed")

# legal forward transitions of a run's lifecycle
_TRANSITIONS = {
    "generating": {"training", "failed"},
    "training": {"awaiting_feedback", "done", "failed", "generating"},
    "awaiting_feedback": {"generating", "failed"},
    "done": set(),
    "failed": set(),
}


@dataclass
class Feedback:
    description: str
    improvement: str

    def validate(self) -> None:
        if not self.improvement.strip():
            raise ValueError("feedback improvement text must be nonempty")


@dataclass
class IterationRecord:
    index: int
    rounds_used: int
    reward_hash: str
    transcript_hash: str
    reward_source: str = ""
    prompt_file: str = "prompt.txt"
    transcript_file: str = "transcript.json"
    reward_file: str = "reward.rdsl"
    curve_file: str = "curve.csv"
    checkpoint_file: str = "policy.ckpt"
    rollout_files: list[str] = field(default_factory=list)
    evaluation: dict = field(default_factory=dict)   # success_rate, mean_return, n_episodes
    description_draft: str = ""
    feedback: Feedback | None = None                  # feedback given on this iteration

    def to_dict(self) -> dict:
        d = asdict(self)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "IterationRecord":
        fb = d.get("feedback")
        return cls(
            index=d["index"],
            rounds_used=d["rounds_used"],
            reward_hash=d["reward_hash"],
            transcript_hash=d["transcript_hash"],
            reward_source=d.get("reward_source", ""),
            prompt_file=d.get("prompt_file", "prompt.txt"),
            transcript_file=d.get("transcript_file", "transcript.json"),
            reward_file=d.get("reward_file", "reward.rdsl"),
            curve_file=d.get("curve_file", "curve.csv"),
            checkpoint_file=d.get("checkpoint_file", "policy.ckpt"),
            rollout_files=list(d.get("rollout_files", [])),
            evaluation=dict(d.get("evaluation", {})),
            description_draft=d.get("description_draft", ""),
            feedback=Feedback(**fb) if fb else None,
        )


@dataclass
class RunRecord:
    run_id: str
    env_id: str
    instruction: str
    mode: str                 # zero_shot | few_shot
    algo: str
    profile: str
    seed: int
    budget_steps: int
    transport_kind: str
    interactive: bool
    cassette: str = ""
    status: str = "generating"
    iterations: list[IterationRecord] = field(default_factory=list)
    quarantined: list[str] = field(default_factory=list)
    error: str = ""

    def transition(self, new_status: str) -> None:
        if new_status not in STATUSES:
            raise ValueError(f"unknown status '{new_status}'")
        if new_status not in _TRANSITIONS[self.status]:
            raise WrongState(self.run_id, self.status, new_status)
        self.status = new_status

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "env_id": self.env_id,
            "instruction": self.instruction,
            "mode": self.mode,
            "algo": self.algo,
            "profile": self.profile,
            "seed": self.seed,
            "budget_steps": self.budget_steps,
            "transport_kind": self.transport_kind,
            "interactive": self.interactive,
            "cassette": self.cassette,
            "status": self.status,
            "iterations": [it.to_dict() for it in self.iterations],
            "quarantined": list(self.quarantined),
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        rec = cls(
            run_id=d["run_id"],
            env_id=d["env_id"],
            instruction=d["instruction"],
            mode=d["mode"],
            algo=d["algo"],
            profile=d["profile"],
            seed=d["seed"],
            budget_steps=d["budget_steps"],
            transport_kind=d["transport_kind"],
            interactive=d.get("interactive", True),
            cassette=d.get("cassette", ""),
            status=d.get("status", "generating"),
            quarantined=list(d.get("quarantined", [])),
            error=d.get("error", ""),
        )
        rec.iterations = [IterationRecord.from_dict(x) for x in d.get("iterations", [])]
        return rec

    def content_hash(self) -> str:
        """Hash of run content excluding identity (run_id) and volatile
        fields (cassette paths), so identical configs replayed
        deterministically hash equal."""
        d = self.to_dict()
        d.pop("run_id")
        d.pop("cassette", None)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()
