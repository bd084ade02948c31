"""Training drivers, evaluation, learning curves, and policy checkpoints.

A full run is bit-reproducible given (seed, profile): every random draw comes
from generators derived from the master seed, environments are seeded per
episode from the same stream, and evaluation uses its own fixed seed block.
Runtime DomainErrors from the reward program zero that step's reward and are
counted as incidents; they never abort training.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .. import envlab
from ..envlab.base import make_env
from ..rdsl import TypedProgram, evaluate
from ..rdsl.errors import RdslError
from .config import AlgoConfig, get_config
from .nets import Adam, MlpNet
from .ppo import GaussianPolicy, gae, ppo_update
from .sac import ReplayBuffer, SacNets, SacOptimizers, SquashedGaussianPolicy, sac_update

CHECKPOINT_MAGIC = b"T2RCKPT1"
EVAL_SEED_STRIDE = 100_003


@dataclass
class Policy:
    """An evaluable policy: network plus the observation scaling it was
    trained with."""

    kind: str  # 'sac' | 'ppo'
    inner: object
    obs_scale: float

    def act(self, obs: np.ndarray, rng: np.random.Generator, stochastic: bool = True) -> np.ndarray:
        return self.inner.act(np.asarray(obs) * self.obs_scale, rng, stochastic=stochastic)


class RandomPolicy:
    """Uniform actions; the null baseline for success-rate comparisons."""

    def __init__(self, action_dim: int):
        self.action_dim = action_dim

    def act(self, obs, rng: np.random.Generator, stochastic: bool = True):
        return rng.uniform(-1.0, 1.0, self.action_dim)


@dataclass
class CurveRow:
    step: int
    mean_return: float
    success_rate: float


@dataclass
class LearningCurve:
    rows: list[CurveRow] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["step,mean_return,success_rate"]
        for r in self.rows:
            lines.append(f"{r.step},{r.mean_return:.6f},{r.success_rate:.6f}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "LearningCurve":
        rows = []
        for line in text.strip().splitlines()[1:]:
            step, ret, succ = line.split(",")
            rows.append(CurveRow(int(step), float(ret), float(succ)))
        return cls(rows)

    def best_success(self) -> float:
        return max((r.success_rate for r in self.rows), default=0.0)

    def final_success(self) -> float:
        return self.rows[-1].success_rate if self.rows else 0.0


@dataclass
class TrainResult:
    policy: Policy
    curve: LearningCurve
    env_id: str
    algo: str
    config: AlgoConfig
    env_steps: int
    domain_incidents: int
    stopped_early: bool


def episode_rollout(
    env,
    policy,
    rng: np.random.Generator,
    reward: TypedProgram | None = None,
    stochastic: bool = True,
    seed: int | None = None,
    frames_out: list | None = None,
):
    """Play one episode; returns (episodic_return, success, steps, incidents).

    Success uses the environment predicate, never the reward program: 'any'
    environments succeed if the predicate held at any step, 'final' ones only
    at the last step.
    """
    snapshot = env.reset(seed=seed)
    obs = envlab.snapshot_to_obs(env.env_id, snapshot)
    total = 0.0
    succeeded = False
    incidents = 0
    success_now = False
    for _ in range(env.episode_len):
        action = policy.act(obs, rng, stochastic=stochastic)
        snapshot = env.step(action)
        obs = envlab.snapshot_to_obs(env.env_id, snapshot)
        r = 0.0
        if reward is not None:
            try:
                r = evaluate(reward, snapshot, action)
            except RdslError:
                incidents += 1
        total += r
        success_now = env.success(snapshot)
        succeeded = succeeded or success_now
        if frames_out is not None:
            frames_out.append(env.frame(snapshot, r, success_now))
    final = success_now if env.success_mode == "final" else succeeded
    return total, final, env.episode_len, incidents


def evaluate_success(
    env_id: str,
    policy,
    n_episodes: int,
    seed: int,
    episode_len: int | None = None,
    reward: TypedProgram | None = None,
    stochastic: bool = True,
    record_dir: str | Path | None = None,
    record_episodes: int = 0,
) -> tuple[float, float]:
    """Mean env-predicate success over seeded episodes (and mean return of
    `reward` when given). Deterministic in (policy, seed)."""
    if n_episodes < 1:
        raise ValueError("n_episodes must be >= 1")
    env = make_env(env_id, episode_len or 200)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xE7A1]))
    successes = 0
    returns = []
    for i in range(n_episodes):
        frames: list | None = None
        if record_dir is not None and i < record_episodes:
            frames = []
        total, ok, _, _ = episode_rollout(
            env, policy, rng, reward=reward, stochastic=stochastic,
            seed=seed * EVAL_SEED_STRIDE + i, frames_out=frames,
        )
        successes += int(ok)
        returns.append(total)
        if frames is not None:
            path = Path(record_dir) / f"ep{i:02d}.jsonl"
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", encoding="utf-8") as fh:
                for fr in frames:
                    fh.write(json.dumps(fr) + "\n")
    return successes / n_episodes, float(np.mean(returns))


def _emit(on_event: Callable | None, payload: dict) -> None:
    if on_event is not None:
        on_event(payload)


def train(
    env_id: str,
    reward: TypedProgram,
    algo: str,
    profile: str = "manip",
    budget_steps: int = 200_000,
    seed: int = 0,
    on_event: Callable | None = None,
    success_stop: float | None = None,
    eval_stochastic: bool = True,
    config_overrides: dict | None = None,
) -> TrainResult:
    """Train a policy for `reward` on `env_id` with the given algorithm and
    profile; returns the policy and its learning curve."""
    cfg = get_config(algo, profile, **(config_overrides or {}))
    if algo == "sac":
        return _train_sac(env_id, reward, cfg, budget_steps, seed, on_event,
                          success_stop, eval_stochastic)
    if algo == "ppo":
        return _train_ppo(env_id, reward, cfg, budget_steps, seed, on_event,
                          success_stop, eval_stochastic)
    raise ValueError(f"unknown algo '{algo}'")


def _reward_of(reward: TypedProgram, snapshot, action) -> tuple[float, int]:
    try:
        return evaluate(reward, snapshot, action), 0
    except RdslError:
        return 0.0, 1


def _train_sac(env_id, reward, cfg, budget_steps, seed, on_event, success_stop,
               eval_stochastic) -> TrainResult:
    master = np.random.SeedSequence(seed)
    seq_env, seq_net, seq_act, seq_batch, seq_eval = (
        np.random.default_rng(s) for s in master.spawn(5)
    )
    env = make_env(env_id, cfg.episode_len)
    obs_dim = envlab.obs_dim(env_id)
    act_dim = env.action_dim
    nets = SacNets.create(obs_dim, act_dim, cfg, seq_net)
    opts = SacOptimizers.create(nets, cfg)
    buffer = ReplayBuffer(cfg.buffer_capacity, obs_dim, act_dim)
    policy = Policy("sac", nets.actor, cfg.obs_scale)

    curve = LearningCurve()
    succ, ret = evaluate_success(env_id, policy, cfg.eval_episodes, seed + 7,
                                 cfg.episode_len, reward, eval_stochastic)
    curve.rows.append(CurveRow(0, ret, succ))
    _emit(on_event, {"type": "eval", "step": 0, "success_rate": succ, "mean_return": ret})

    incidents = 0
    env_steps = 0
    stopped = False
    while env_steps < budget_steps and not stopped:
        snapshot = env.reset(seed=int(seq_env.integers(2**31)))
        obs = envlab.snapshot_to_obs(env_id, snapshot)
        for _ in range(cfg.episode_len):
            if env_steps < cfg.learning_starts:
                action = seq_act.uniform(-1.0, 1.0, act_dim)
            elif cfg.explore_eps > 0.0 and seq_act.uniform() < cfg.explore_eps:
                # occasional uniform actions keep rare transitions (e.g. the
                # release that finishes a stack) discoverable after the
                # squashed policy saturates
                action = seq_act.uniform(-1.0, 1.0, act_dim)
            else:
                action = nets.actor.act(obs * cfg.obs_scale, seq_act, stochastic=True)
            next_snapshot = env.step(action)
            next_obs = envlab.snapshot_to_obs(env_id, next_snapshot)
            r, bad = _reward_of(reward, next_snapshot, action)
            incidents += bad
            buffer.add(obs * cfg.obs_scale, action, r, next_obs * cfg.obs_scale, 0.0)
            obs = next_obs
            env_steps += 1

            if buffer.size >= cfg.learning_starts and env_steps % cfg.train_freq == 0:
                for _ in range(cfg.grad_steps):
                    sac_update(nets, opts, buffer.sample(cfg.batch_size, seq_batch),
                               seq_batch, cfg)

            if env_steps % cfg.eval_every == 0 or env_steps >= budget_steps:
                succ, ret = evaluate_success(env_id, policy, cfg.eval_episodes, seed + 7,
                                             cfg.episode_len, reward, eval_stochastic)
                curve.rows.append(CurveRow(env_steps, ret, succ))
                _emit(on_event, {"type": "eval", "step": env_steps,
                                 "success_rate": succ, "mean_return": ret})
                if success_stop is not None and succ >= success_stop:
                    stopped = True
                if env_steps >= budget_steps:
                    break
            if stopped:
                break

    return TrainResult(policy=policy, curve=curve, env_id=env_id, algo="sac",
                       config=cfg, env_steps=env_steps, domain_incidents=incidents,
                       stopped_early=stopped)


def _train_ppo(env_id, reward, cfg, budget_steps, seed, on_event, success_stop,
               eval_stochastic) -> TrainResult:
    master = np.random.SeedSequence(seed)
    seq_env, seq_net, seq_act, seq_perm, _ = (np.random.default_rng(s) for s in master.spawn(5))
    envs = [make_env(env_id, cfg.episode_len) for _ in range(cfg.n_envs)]
    obs_dim = envlab.obs_dim(env_id)
    act_dim = envs[0].action_dim
    policy_net = GaussianPolicy.create(obs_dim, act_dim, cfg.hidden, cfg.layers, seq_net)
    value_net = MlpNet.create((obs_dim, *([cfg.hidden] * cfg.layers), 1), seq_net)
    opt_p = Adam(policy_net.params.size, cfg.lr, cfg.adam_betas, cfg.adam_eps)
    opt_v = Adam(value_net.params.size, cfg.lr, cfg.adam_betas, cfg.adam_eps)
    policy = Policy("ppo", policy_net, cfg.obs_scale)

    per_env = max(1, cfg.steps_per_update // cfg.n_envs)
    curve = LearningCurve()
    succ, ret = evaluate_success(env_id, policy, cfg.eval_episodes, seed + 7,
                                 cfg.episode_len, reward, eval_stochastic)
    curve.rows.append(CurveRow(0, ret, succ))
    _emit(on_event, {"type": "eval", "step": 0, "success_rate": succ, "mean_return": ret})

    from .rollout import collect_rollout

    obs: np.ndarray | None = None
    incidents = 0
    env_steps = 0
    stopped = False
    next_eval = cfg.eval_every
    while env_steps < budget_steps and not stopped:
        rollout, obs, bad = collect_rollout(
            envs, policy_net, value_net, cfg.steps_per_update, reward,
            seq_act, seq_env, obs_scale=cfg.obs_scale, obs=obs,
        )
        incidents += bad
        T, N = rollout["rewards"].shape
        env_steps += T * N

        advantages = np.zeros((T, N))
        returns = np.zeros((T, N))
        for i in range(N):
            advantages[:, i], returns[:, i] = gae(
                rollout["rewards"][:, i], rollout["values"][:, i],
                rollout["dones"][:, i], cfg.gamma, cfg.gae_lambda,
            )
        batch = {
            "obs": rollout["obs"].reshape(T * N, obs_dim),
            "actions": rollout["actions"].reshape(T * N, act_dim),
            "advantages": advantages.reshape(T * N),
            "returns": returns.reshape(T * N),
            "logp": rollout["logp"].reshape(T * N),
        }
        ppo_update(policy_net, value_net, opt_p, opt_v, batch, cfg, seq_perm)

        if env_steps >= next_eval or env_steps >= budget_steps:
            next_eval += cfg.eval_every
            succ, ret = evaluate_success(env_id, policy, cfg.eval_episodes, seed + 7,
                                         cfg.episode_len, reward, eval_stochastic)
            curve.rows.append(CurveRow(env_steps, ret, succ))
            _emit(on_event, {"type": "eval", "step": env_steps,
                             "success_rate": succ, "mean_return": ret})
            if success_stop is not None and succ >= success_stop:
                stopped = True

    return TrainResult(policy=policy, curve=curve, env_id=env_id, algo="ppo",
                       config=cfg, env_steps=env_steps, domain_incidents=incidents,
                       stopped_early=stopped)


# --- checkpoints ---

def save_checkpoint(path: str | Path, result_or_policy, env_id: str | None = None,
                    config: AlgoConfig | None = None, extra: dict | None = None) -> None:
    """Versioned binary: magic, JSON header (config echo, sizes, layout
    version), then the flat policy parameter vector as float64."""
    if isinstance(result_or_policy, TrainResult):
        policy = result_or_policy.policy
        env_id = result_or_policy.env_id
        config = result_or_policy.config
    else:
        policy = result_or_policy
    header = {
        "kind": policy.kind,
        "env_id": env_id,
        "sizes": list(policy.inner.sizes),
        "obs_scale": policy.obs_scale,
        "obs_layout_version": envlab.OBS_LAYOUT_VERSION,
        "config": config.as_dict() if config is not None else None,
    }
    header.update(extra or {})
    blob = json.dumps(header).encode("utf-8")
    params = np.asarray(policy.inner.params, dtype=np.float64)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<II", len(blob), params.size))
        fh.write(blob)
        fh.write(params.tobytes())


def load_checkpoint(path: str | Path) -> tuple[Policy, dict]:
    raw = Path(path).read_bytes()
    if raw[:8] != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a policy checkpoint (bad magic)")
    header_len, n_params = struct.unpack("<II", raw[8:16])
    header = json.loads(raw[16 : 16 + header_len].decode("utf-8"))
    params = np.frombuffer(raw[16 + header_len :], dtype=np.float64, count=n_params).copy()
    if header["obs_layout_version"] != envlab.OBS_LAYOUT_VERSION:
        raise ValueError(
            f"{path}: observation layout v{header['obs_layout_version']} does not match "
            f"runtime v{envlab.OBS_LAYOUT_VERSION}"
        )
    sizes = tuple(header["sizes"])
    params32 = params.astype(np.float32)
    if header["kind"] == "sac":
        inner = SquashedGaussianPolicy(sizes=sizes, params=params32)
    elif header["kind"] == "ppo":
        inner = GaussianPolicy(sizes=sizes, params=params32)
    else:
        raise ValueError(f"unknown policy kind {header['kind']!r}")
    return Policy(header["kind"], inner, header["obs_scale"]), header
