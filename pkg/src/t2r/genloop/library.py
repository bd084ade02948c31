"""Skill library: (instruction, verified reward source) pairs with embeddings
for few-shot retrieval."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .embed import HashingEmbedder


class EmptyLibrary(Exception):
    pass


@dataclass(frozen=True)
class SkillEntry:
    task_id: str
    instruction: str
    reward_source: str
    embedding: np.ndarray  # unit vector

    def __post_init__(self):
        n = float(np.linalg.norm(self.embedding))
        if abs(n - 1.0) > 1e-6:
            raise ValueError(f"skill embedding must be unit-norm, |v|={n}")


def load_library(path: str | Path, embedder: Callable | None = None) -> list[SkillEntry]:
    """Load a JSON list of entries; embeddings are recomputed with the
    default embedder when absent from the file."""
    embedder = embedder or HashingEmbedder()
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = []
    for item in data:
        emb = item.get("embedding")
        vec = np.asarray(emb, dtype=np.float64) if emb is not None else embedder(item["instruction"])
        entries.append(
            SkillEntry(
                task_id=item["task_id"],
                instruction=item["instruction"],
                reward_source=item["reward_source"],
                embedding=vec,
            )
        )
    return entries


def save_library(path: str | Path, entries: Sequence[SkillEntry], with_embeddings: bool = False) -> None:
    data = []
    for e in entries:
        item = {"task_id": e.task_id, "instruction": e.instruction, "reward_source": e.reward_source}
        if with_embeddings:
            item["embedding"] = [float(x) for x in e.embedding]
        data.append(item)
    Path(path).write_text(json.dumps(data, indent=2), encoding="utf-8")


def fixture_library(embedder: Callable | None = None) -> list[SkillEntry]:
    """The shipped six-task retrieval library."""
    path = Path(resources.files("t2r.genloop") / "data" / "library" / "skills.json")
    return load_library(path, embedder)


def retrieve(
    library: Sequence[SkillEntry],
    instruction: str,
    k: int = 1,
    exclude_task: str | None = None,
    embedder: Callable | None = None,
) -> list[SkillEntry]:
    """Top-k entries by cosine similarity to the instruction embedding, after
    excluding the queried task's own entry; ties break by ascending task_id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    embedder = embedder or HashingEmbedder()
    candidates = [e for e in library if e.task_id != exclude_task]
    if not candidates:
        raise EmptyLibrary(
            f"no skill entries remain after excluding task '{exclude_task}'"
        )
    query = embedder(instruction)
    scored = sorted(
        candidates,
        key=lambda e: (-float(np.dot(query, e.embedding)), e.task_id),
    )
    return scored[:k]


class SkillLibrary:
    """Mutable library wrapper: lock-free snapshot reads, serialized appends."""

    def __init__(self, entries: Sequence[SkillEntry] = (), embedder: Callable | None = None):
        self._entries = list(entries)
        self._embedder = embedder or HashingEmbedder()
        self._lock = threading.Lock()

    def snapshot(self) -> list[SkillEntry]:
        return list(self._entries)

    def add(self, task_id: str, instruction: str, reward_source: str) -> SkillEntry:
        entry = SkillEntry(task_id, instruction, reward_source, self._embedder(instruction))
        with self._lock:
            entries = list(self._entries)
            entries.append(entry)
            self._entries = entries
        return entry

    def retrieve(self, instruction: str, k: int = 1, exclude_task: str | None = None) -> list[SkillEntry]:
        return retrieve(self.snapshot(), instruction, k, exclude_task, self._embedder)
