"""The t2r command line."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .. import envlab
from ..genloop import TransportError, make_transport
from ..genloop.library import HashingEmbedder, SkillEntry, load_library, save_library
from ..rdsl import parse, typecheck
from ..rl import evaluate_success, load_checkpoint, save_checkpoint
from ..rl import train as train_policy
from .pipeline import RunConfig, run_experiment, submit_feedback
from .records import Feedback
from .store import RunStore

DEFAULT_RUNS_DIR = "runs"


def _store(runs_dir: str) -> RunStore:
    return RunStore(runs_dir)


@click.group()
def main():
    """Instruction-to-reward pipeline: generate, train, evaluate, refine."""


run_opts = [
    click.option("--env", "env_id", required=True, type=click.Choice(list(envlab.ENV_IDS))),
    click.option("--instruction", required=True),
    click.option("--mode", type=click.Choice(["zero_shot", "few_shot"]), default="zero_shot"),
    click.option("--algo", type=click.Choice(["sac", "ppo"]), default="sac"),
    click.option("--profile", default="manip"),
    click.option("--seed", type=int, default=0),
    click.option("--budget-steps", type=int, default=60_000),
    click.option("--batch", "interactive", flag_value=False, default=True,
                 help="finish after one iteration instead of awaiting feedback"),
    click.option("--interactive", "interactive", flag_value=True),
    click.option("--runs-dir", default=DEFAULT_RUNS_DIR),
]


def _apply(opts):
    def decorate(fn):
        for opt in reversed(opts):
            fn = opt(fn)
        return fn
    return decorate


@main.command("run")
@_apply(run_opts)
@click.option("--transport", "transport_kind", type=click.Choice(["live", "replay", "scripted"]),
              default="replay")
@click.option("--cassette", type=click.Path(exists=True, dir_okay=False), default=None)
def run_cmd(env_id, instruction, mode, algo, profile, seed, budget_steps, interactive,
            runs_dir, transport_kind, cassette):
    """Create a run: generate a reward, train, evaluate."""
    try:
        transport = make_transport(transport_kind, cassette=cassette)
    except TransportError as exc:
        raise click.ClickException(str(exc))
    config = RunConfig(env_id=env_id, instruction=instruction, mode=mode, algo=algo,
                       profile=profile, seed=seed, budget_steps=budget_steps,
                       transport_kind=transport_kind, cassette=cassette or "",
                       interactive=interactive)
    record = run_experiment(_store(runs_dir), config, transport)
    click.echo(json.dumps({"run_id": record.run_id, "status": record.status,
                           "evaluation": record.iterations[-1].evaluation}, indent=2))


@main.command("replay")
@click.option("--cassette", required=True, type=click.Path(exists=True, dir_okay=False))
@_apply(run_opts)
def replay_cmd(cassette, env_id, instruction, mode, algo, profile, seed, budget_steps,
               interactive, runs_dir):
    """Run deterministically from a recorded cassette."""
    transport = make_transport("replay", cassette=cassette)
    config = RunConfig(env_id=env_id, instruction=instruction, mode=mode, algo=algo,
                       profile=profile, seed=seed, budget_steps=budget_steps,
                       transport_kind="replay", cassette=cassette, interactive=interactive)
    record = run_experiment(_store(runs_dir), config, transport)
    click.echo(json.dumps({"run_id": record.run_id, "status": record.status,
                           "content_hash": record.content_hash()}, indent=2))


@main.command("feedback")
@click.argument("run_id")
@click.option("--improvement", required=True)
@click.option("--description", default="")
@click.option("--transport", "transport_kind", type=click.Choice(["live", "replay", "scripted"]),
              default=None, help="defaults to the run's original transport")
@click.option("--cassette", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--runs-dir", default=DEFAULT_RUNS_DIR)
def feedback_cmd(run_id, improvement, description, transport_kind, cassette, runs_dir):
    """Submit feedback on an awaiting run and train the next iteration."""
    store = _store(runs_dir)
    record = store.load(run_id)
    kind = transport_kind or record.transport_kind
    transport = make_transport(kind, cassette=cassette)
    iteration = submit_feedback(store, run_id, Feedback(description, improvement), transport)
    click.echo(json.dumps({"run_id": run_id, "iteration": iteration.index,
                           "evaluation": iteration.evaluation}, indent=2))


@main.command("train")
@click.option("--env", "env_id", required=True, type=click.Choice(list(envlab.ENV_IDS)))
@click.option("--algo", type=click.Choice(["sac", "ppo"]), default="sac")
@click.option("--profile", default="manip")
@click.option("--seed", type=int, default=0)
@click.option("--reward", "reward_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="reward program file (.rdsl); default: the env oracle")
@click.option("--budget-steps", type=int, default=60_000)
@click.option("--success-stop", type=float, default=None)
@click.option("--out", "out_file", type=click.Path(dir_okay=False), default=None)
def train_cmd(env_id, algo, profile, seed, reward_file, budget_steps, success_stop, out_file):
    """Train a policy against a reward program file."""
    if reward_file is None:
        reward = envlab.oracle_reward(env_id)
    else:
        source = Path(reward_file).read_text(encoding="utf-8")
        reward = typecheck(parse(source), envlab.env_schema(env_id), source)

    def on_event(ev):
        if ev.get("type") == "eval":
            click.echo(f"step {ev['step']:>8}  success {ev['success_rate']:.2f}  "
                       f"return {ev['mean_return']:.1f}")

    result = train_policy(env_id, reward, algo, profile, budget_steps=budget_steps,
                          seed=seed, on_event=on_event, success_stop=success_stop)
    if out_file:
        save_checkpoint(out_file, result)
        click.echo(f"checkpoint written to {out_file}")
    click.echo(f"final success: {result.curve.final_success():.2f} "
               f"(best {result.curve.best_success():.2f}) after {result.env_steps} steps")


@main.command("eval")
@click.option("--env", "env_id", required=True, type=click.Choice(list(envlab.ENV_IDS)))
@click.option("--checkpoint", "ckpt", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--episodes", type=int, default=100)
@click.option("--seed", type=int, default=0)
def eval_cmd(env_id, ckpt, episodes, seed):
    """Evaluate a checkpointed policy's task success rate."""
    policy, header = load_checkpoint(ckpt)
    rate, _ = evaluate_success(env_id, policy, episodes, seed)
    click.echo(f"success rate over {episodes} episodes: {rate:.3f}")


@main.group("library")
def library_group():
    """Skill-library maintenance."""


@library_group.command("add")
@click.option("--file", "library_file", required=True, type=click.Path(dir_okay=False))
@click.option("--task-id", required=True)
@click.option("--instruction", required=True)
@click.option("--reward", "reward_file", required=True, type=click.Path(exists=True, dir_okay=False))
def library_add(library_file, task_id, instruction, reward_file):
    """Append a verified (instruction, reward) pair to a library file."""
    path = Path(library_file)
    entries = load_library(path) if path.exists() else []
    if any(e.task_id == task_id for e in entries):
        raise click.ClickException(f"task id '{task_id}' already present in {library_file}")
    source = Path(reward_file).read_text(encoding="utf-8")
    entries.append(SkillEntry(task_id, instruction, source, HashingEmbedder()(instruction)))
    save_library(path, entries)
    click.echo(f"{library_file}: {len(entries)} entries")


@main.command("serve")
@click.option("--port", type=int, default=8008)
@click.option("--host", default="127.0.0.1")
@click.option("--runs-dir", default=DEFAULT_RUNS_DIR)
@click.option("--console-dist", default=None,
              help="path to the built console assets (default: autodetect frontend/dist)")
def serve_cmd(port, host, runs_dir, console_dist):
    """Serve the HTTP API and, when built, the web console."""
    import uvicorn

    from .service import build_app

    dist = Path(console_dist) if console_dist else _default_console_dist()
    app = build_app(_store(runs_dir), console_dist=dist)
    if dist is not None and dist.exists():
        click.echo(f"serving console from {dist}")
    else:
        click.echo("console not built; serving API only")
    uvicorn.run(app, host=host, port=port, log_level="warning")


def _default_console_dist() -> Path | None:
    for candidate in (Path("frontend/dist"), Path(__file__).resolve().parents[3] / "frontend" / "dist"):
        if candidate.exists():
            return candidate
    return None


if __name__ == "__main__":
    sys.exit(main())
