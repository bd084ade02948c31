"""The generate -> verify -> train -> evaluate -> feedback pipeline."""

from __future__ import annotations

import json
import traceback
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import envlab
from ..genloop import (
    RefinementExhausted,
    TranscriptTurn,
    TransportError,
    VerifiedReward,
    build_feedback_prompt,
    build_generation_prompt,
    fixture_library,
    refine_from_prompt,
)
from ..rl import evaluate_success, save_checkpoint, train
from ..rl.nets import NonFiniteLoss
from .records import Feedback, IterationRecord, RunRecord, WrongState
from .store import RunStore

RECORDED_EPISODES = 2


@dataclass
class RunConfig:
    env_id: str
    instruction: str
    mode: str = "zero_shot"
    algo: str = "sac"
    profile: str = "manip"
    seed: int = 0
    budget_steps: int = 60_000
    transport_kind: str = "scripted"
    cassette: str = ""
    interactive: bool = True
    max_rounds: int = 3
    success_stop: float | None = 0.9
    exclude_task: str | None = None
    run_id: str | None = None
    config_overrides: dict = field(default_factory=dict)


def _transcript_json(turns: list[TranscriptTurn]) -> str:
    return json.dumps([{"role": t.role, "content": t.content} for t in turns], indent=2)


def _transcript_hash(turns: list[TranscriptTurn]) -> str:
    import hashlib

    blob = json.dumps([{"role": t.role, "content": t.content} for t in turns],
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _final_frame_stats(env_id: str, rollout_file: Path) -> dict:
    frames = [json.loads(line) for line in rollout_file.read_text().splitlines() if line.strip()]
    if not frames:
        return {}
    last = frames[-1]
    stats: dict = {"ended_in_success": bool(last.get("success"))}
    pos = last.get("positions", {})
    if env_id == "liftcube_lite" and "cubeA" in pos:
        stats["final_cube_height"] = round(pos["cubeA"][2], 4)
    elif env_id == "pickcube_lite" and {"cubeA", "goal"} <= set(pos):
        d = np.linalg.norm(np.array(pos["cubeA"]) - np.array(pos["goal"]))
        stats["final_cube_to_goal_m"] = round(float(d), 4)
    elif env_id == "stackcube_lite" and {"cubeA", "cubeB"} <= set(pos):
        target = np.array(pos["cubeB"]) + np.array([0.0, 0.0, 0.04])
        stats["final_stack_offset_m"] = round(float(np.linalg.norm(np.array(pos["cubeA"]) - target)), 4)
    elif env_id == "opendrawer_lite" and "qpos" in last:
        stats["final_drawer_qpos"] = round(last["qpos"], 4)
    elif env_id == "mover_lite" and "mean_vx" in last:
        stats["final_mean_forward_velocity"] = round(last["mean_vx"], 4)
    if "grasped" in last:
        stats["held_at_end"] = bool(last.get("grasped"))
    return stats


def draft_description(env_id: str, success_rate: float, rollout_file: Path | None) -> str:
    """Prefilled rollout summary the human can edit before sending feedback."""
    parts = [f"Across the evaluation episodes the policy succeeded {round(100 * success_rate)}% of the time."]
    if rollout_file is not None and rollout_file.exists():
        stats = _final_frame_stats(env_id, rollout_file)
        if stats.get("ended_in_success"):
            parts.append("The recorded rollout ends in a success state.")
        else:
            parts.append("The recorded rollout does not end in a success state.")
        for key, label in [
            ("final_cube_height", "final cube height"),
            ("final_cube_to_goal_m", "final cube-to-goal distance"),
            ("final_stack_offset_m", "final offset from the stack target"),
            ("final_drawer_qpos", "final drawer joint position"),
            ("final_mean_forward_velocity", "mean forward velocity"),
        ]:
            if key in stats:
                parts.append(f"The {label} was {stats[key]}.")
        if "held_at_end" in stats:
            parts.append(
                "The object is still held by the gripper at the end." if stats["held_at_end"]
                else "The gripper is empty at the end."
            )
    return " ".join(parts)


def _persist_iteration(
    store: RunStore,
    record: RunRecord,
    index: int,
    prompt_text: str,
    verified: VerifiedReward,
    config: RunConfig,
) -> IterationRecord:
    it_dir = store.iter_dir(record.run_id, index)
    it_dir.mkdir(parents=True, exist_ok=True)
    (it_dir / "prompt.txt").write_text(prompt_text, encoding="utf-8")
    (it_dir / "transcript.json").write_text(_transcript_json(verified.transcript), encoding="utf-8")
    (it_dir / "reward.rdsl").write_text(verified.program.source, encoding="utf-8")
    return IterationRecord(
        index=index,
        rounds_used=verified.rounds_used,
        reward_hash=verified.program.source_hash(),
        transcript_hash=_transcript_hash(verified.transcript),
        reward_source=verified.program.source,
    )


def _train_iteration(
    store: RunStore,
    record: RunRecord,
    iteration: IterationRecord,
    verified: VerifiedReward,
    config: RunConfig,
) -> IterationRecord:
    it_dir = store.iter_dir(record.run_id, iteration.index)
    run_id = record.run_id

    def on_event(ev: dict) -> None:
        store.append_event(run_id, {"iteration": iteration.index, **ev})

    result = train(
        record.env_id,
        verified.program,
        record.algo,
        record.profile,
        budget_steps=record.budget_steps,
        seed=record.seed,
        on_event=on_event,
        success_stop=config.success_stop,
        config_overrides=config.config_overrides,
    )
    (it_dir / "curve.csv").write_text(result.curve.to_csv(), encoding="utf-8")
    save_checkpoint(it_dir / "policy.ckpt", result)

    rollout_dir = it_dir / "rollouts"
    success_rate, mean_return = evaluate_success(
        record.env_id,
        result.policy,
        result.config.eval_episodes,
        record.seed + 7,
        episode_len=result.config.episode_len,
        reward=verified.program,
        record_dir=rollout_dir,
        record_episodes=RECORDED_EPISODES,
    )
    iteration.rollout_files = sorted(p.name for p in rollout_dir.glob("*.jsonl"))
    first_rollout = rollout_dir / iteration.rollout_files[0] if iteration.rollout_files else None
    iteration.description_draft = draft_description(record.env_id, success_rate, first_rollout)
    iteration.evaluation = {
        "success_rate": success_rate,
        "mean_return": mean_return,
        "n_episodes": result.config.eval_episodes,
        "env_steps": result.env_steps,
        "domain_incidents": result.domain_incidents,
    }
    # eval.json marks the iteration complete; write it last
    (it_dir / "eval.json").write_text(json.dumps(iteration.evaluation, indent=2), encoding="utf-8")
    return iteration


def run_experiment(store: RunStore, config: RunConfig, transport) -> RunRecord:
    """Execute one instruction end to end; the run is persisted in every
    state including failure."""
    envlab.env_schema(config.env_id)  # unknown env fails before any LLM call
    run_id = config.run_id or store.new_run_id(config.env_id)
    record = RunRecord(
        run_id=run_id,
        env_id=config.env_id,
        instruction=config.instruction,
        mode=config.mode,
        algo=config.algo,
        profile=config.profile,
        seed=config.seed,
        budget_steps=config.budget_steps,
        transport_kind=config.transport_kind,
        interactive=config.interactive,
        cassette=config.cassette,
    )
    store.create(record)
    config_echo = {
        "env_id": record.env_id, "instruction": record.instruction,
        "mode": record.mode, "algo": record.algo, "profile": record.profile,
        "seed": record.seed, "budget_steps": record.budget_steps,
        "transport_kind": record.transport_kind, "interactive": record.interactive,
        "max_rounds": config.max_rounds, "success_stop": config.success_stop,
        "config_overrides": config.config_overrides,
    }
    (store.run_dir(run_id) / "config.json").write_text(
        json.dumps(config_echo, indent=2), encoding="utf-8")
    store.append_event(run_id, {"type": "status", "status": "generating"})
    try:
        schema = envlab.env_schema(config.env_id)
        library = fixture_library() if config.mode == "few_shot" else None
        prompt = build_generation_prompt(
            schema, config.instruction, config.mode,
            library=library, exclude_task=config.exclude_task,
        )
        verified = refine_from_prompt(prompt, schema, transport, max_rounds=config.max_rounds)
        iteration = _persist_iteration(store, record, 0, prompt.user_text, verified, config)
        record.transition("training")
        store.save(record)
        store.append_event(run_id, {"type": "status", "status": "training", "iteration": 0})

        _train_iteration(store, record, iteration, verified, config)
        # the record only ever lists completed iterations (eval.json present)
        record.iterations.append(iteration)
        record.transition("awaiting_feedback" if config.interactive else "done")
        store.save(record)
        store.append_event(run_id, {"type": "status", "status": record.status, "iteration": 0})
        return record
    except (RefinementExhausted, TransportError, NonFiniteLoss, Exception) as exc:
        record.error = f"{type(exc).__name__}: {exc}"
        if not isinstance(exc, (RefinementExhausted, TransportError, NonFiniteLoss)):
            record.error += "\n" + traceback.format_exc()
        record.status = "failed"
        store.save(record)
        store.append_event(run_id, {"type": "status", "status": "failed", "error": record.error})
        if isinstance(exc, (RefinementExhausted, TransportError, NonFiniteLoss)):
            raise
        raise


def submit_feedback(
    store: RunStore,
    run_id: str,
    feedback: Feedback,
    transport,
    max_rounds: int = 3,
    success_stop: float | None = 0.9,
) -> IterationRecord:
    """Generate, train, and evaluate the next iteration from human feedback."""
    feedback.validate()
    record = store.load(run_id)
    if record.status != "awaiting_feedback":
        raise WrongState(run_id, record.status, "awaiting_feedback")
    prev = record.iterations[-1]
    prev_dir = store.iter_dir(run_id, prev.index)
    prev_source = (prev_dir / prev.reward_file).read_text(encoding="utf-8")
    description = feedback.description.strip() or prev.description_draft

    prev.feedback = Feedback(description=description, improvement=feedback.improvement)
    (prev_dir / "feedback.txt").write_text(
        f"description:\n{description}\n\nimprovement:\n{feedback.improvement}\n",
        encoding="utf-8")
    schema = envlab.env_schema(record.env_id)
    prompt = build_feedback_prompt(prev_source, description, feedback.improvement)

    config = RunConfig(
        env_id=record.env_id,
        instruction=record.instruction,
        mode=record.mode,
        algo=record.algo,
        profile=record.profile,
        seed=record.seed,
        budget_steps=record.budget_steps,
        transport_kind=record.transport_kind,
        interactive=record.interactive,
        max_rounds=max_rounds,
        success_stop=success_stop,
    )
    record.transition("generating")
    store.save(record)
    store.append_event(run_id, {"type": "status", "status": "generating",
                                "iteration": prev.index + 1})
    try:
        verified = refine_from_prompt(prompt, schema, transport, max_rounds=max_rounds)
        iteration = _persist_iteration(store, record, prev.index + 1, prompt.user_text,
                                       verified, config)
        record.transition("training")
        store.save(record)
        store.append_event(run_id, {"type": "status", "status": "training",
                                    "iteration": iteration.index})
        _train_iteration(store, record, iteration, verified, config)
        record.iterations.append(iteration)
        record.transition("awaiting_feedback" if record.interactive else "done")
        store.save(record)
        store.append_event(run_id, {"type": "status", "status": record.status,
                                    "iteration": iteration.index})
        return iteration
    except Exception as exc:
        record.error = f"{type(exc).__name__}: {exc}"
        record.status = "failed"
        store.save(record)
        store.append_event(run_id, {"type": "status", "status": "failed", "error": record.error})
        raise
