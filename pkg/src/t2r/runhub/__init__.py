"""Run orchestration: pipeline, persistence, HTTP service, CLI."""

from .pipeline import RunConfig, draft_description, run_experiment, submit_feedback
from .records import Feedback, IterationRecord, RunRecord, WrongState
from .store import RunStore, UnknownRun

__all__ = [
    "RunConfig",
    "run_experiment",
    "submit_feedback",
    "draft_description",
    "Feedback",
    "IterationRecord",
    "RunRecord",
    "WrongState",
    "RunStore",
    "UnknownRun",
]
