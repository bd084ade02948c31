"""Artifact-first run persistence.

Layout: runs/{id}/record.json plus one iterNN/ directory per iteration
holding prompt.txt, transcript.json, reward.rdsl, curve.csv, eval.json,
policy.ckpt, and rollouts/*.jsonl. eval.json is written last; an iteration
directory without it is incomplete and gets quarantined (renamed, listed in
the record) rather than silently dropped. record.json writes are atomic
(tmp + rename) so a run directory is always loadable.
"""

from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path

from .records import RunRecord


class UnknownRun(KeyError):
    pass


class RunStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._seqs: dict[str, int] = {}

    def _lock(self, run_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(run_id, threading.Lock())

    def run_dir(self, run_id: str) -> Path:
        return self.root / run_id

    def iter_dir(self, run_id: str, index: int) -> Path:
        return self.run_dir(run_id) / f"iter{index:02d}"

    def new_run_id(self, env_id: str) -> str:
        stamp = time.strftime("%Y%m%d-%H%M%S")
        base = f"{env_id}-{stamp}"
        run_id = base
        n = 1
        while self.run_dir(run_id).exists():
            run_id = f"{base}-{n}"
            n += 1
        return run_id

    def create(self, record: RunRecord) -> None:
        d = self.run_dir(record.run_id)
        if d.exists():
            raise FileExistsError(f"run '{record.run_id}' already exists")
        d.mkdir(parents=True)
        self.save(record)

    def save(self, record: RunRecord) -> None:
        path = self.run_dir(record.run_id) / "record.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(record.to_dict(), indent=2), encoding="utf-8")
        os.replace(tmp, path)

    def exists(self, run_id: str) -> bool:
        return (self.run_dir(run_id) / "record.json").exists()

    def load(self, run_id: str) -> RunRecord:
        """Pure read; never mutates the run directory (recovery is explicit)."""
        path = self.run_dir(run_id) / "record.json"
        if not path.exists():
            raise UnknownRun(run_id)
        return RunRecord.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def list_runs(self) -> list[str]:
        return sorted(
            p.name for p in self.root.iterdir()
            if p.is_dir() and (p / "record.json").exists()
        )

    def recover(self, run_id: str) -> RunRecord:
        """Crash recovery for a run with no live executor: iteration dirs
        that never completed (no eval.json) are quarantined — renamed and
        listed on the record, never silently dropped — and a run interrupted
        mid-pipeline is marked failed."""
        record = self.load(run_id)
        run_dir = self.run_dir(run_id)
        complete = {f"iter{it.index:02d}" for it in record.iterations}
        quarantined_now = []
        for d in sorted(run_dir.glob("iter*")):
            if not d.is_dir() or d.name in complete:
                continue
            if (d / "eval.json").exists():
                continue  # finished on disk but unrecorded: leave for inspection
            target = run_dir / f"quarantine-{d.name}"
            if not target.exists():
                os.replace(d, target)
            if target.name not in record.quarantined:
                record.quarantined.append(target.name)
            quarantined_now.append(target.name)
        if record.status in ("generating", "training"):
            record.status = "failed"
            record.error = record.error or (
                "interrupted mid-pipeline; "
                f"{len(quarantined_now)} partial iteration(s) quarantined"
            )
        if quarantined_now or record.status == "failed":
            self.save(record)
        return record

    def recover_all(self) -> None:
        for run_id in self.list_runs():
            record = self.load(run_id)
            if record.status in ("generating", "training"):
                self.recover(run_id)

    # --- events ---

    def events_path(self, run_id: str) -> Path:
        return self.run_dir(run_id) / "events.jsonl"

    def append_event(self, run_id: str, event: dict) -> None:
        with self._lock(run_id):
            path = self.events_path(run_id)
            n = self._seqs.get(run_id)
            if n is None:  # resume numbering after a restart
                n = sum(1 for _ in path.open()) if path.exists() else 0
            event = {"seq": n, **event}
            self._seqs[run_id] = n + 1
            with path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(event) + "\n")

    def read_events(self, run_id: str, after: int = -1) -> list[dict]:
        path = self.events_path(run_id)
        if not path.exists():
            return []
        out = []
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            ev = json.loads(line)
            if ev.get("seq", 0) > after:
                out.append(ev)
        return out
