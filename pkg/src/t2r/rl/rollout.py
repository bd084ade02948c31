"""On-policy rollout collection across parallel environment workers."""

from __future__ import annotations

import hashlib

import numpy as np

from .. import envlab
from ..rdsl import TypedProgram, evaluate
from ..rdsl.errors import RdslError
from .ppo import GaussianPolicy


def collect_rollout(
    envs: list,
    policy: GaussianPolicy,
    value_net,
    steps_per_update: int,
    reward: TypedProgram,
    rng: np.random.Generator,
    env_seed_rng: np.random.Generator,
    obs_scale: float = 1.0,
    obs: np.ndarray | None = None,
):
    """Collect steps_per_update transitions split evenly across the workers.

    Episodes truncate at each env's configured episode length; a truncation
    marks `done` for advantage bookkeeping and the worker resets from the
    seed stream. Reward DomainErrors zero the step's reward and are counted,
    never raised. Returns (batch dict, final obs, bootstrap values,
    incident count).
    """
    from .nets import mlp_forward

    n = len(envs)
    per_env = max(1, steps_per_update // n)
    env_id = envs[0].env_id
    obs_dim = envlab.obs_dim(env_id)
    act_dim = envs[0].action_dim

    if obs is None:
        obs = np.zeros((n, obs_dim))
        for i, env in enumerate(envs):
            snap = env.reset(seed=int(env_seed_rng.integers(2**31)))
            obs[i] = envlab.snapshot_to_obs(env_id, snap)

    T = per_env
    b_obs = np.zeros((T, n, obs_dim), dtype=np.float32)
    b_act = np.zeros((T, n, act_dim), dtype=np.float32)
    b_rew = np.zeros((T, n), dtype=np.float64)
    b_done = np.zeros((T, n), dtype=np.float64)
    b_logp = np.zeros((T, n), dtype=np.float64)
    b_val = np.zeros((T + 1, n), dtype=np.float64)
    incidents = 0

    _, log_std = policy.split()
    std = np.exp(np.asarray(log_std, dtype=np.float64))
    for t in range(T):
        scaled = obs * obs_scale
        mu = policy.mean(scaled)
        actions = mu + std * rng.standard_normal((n, act_dim))
        b_logp[t] = policy.log_prob(scaled, actions)
        b_val[t] = mlp_forward(value_net.params, value_net.sizes, scaled)[0][:, 0]
        b_obs[t] = scaled
        b_act[t] = actions
        for i, env in enumerate(envs):
            clipped = np.clip(actions[i], -1.0, 1.0)
            snap = env.step(clipped)
            try:
                b_rew[t, i] = evaluate(reward, snap, clipped)
            except RdslError:
                b_rew[t, i] = 0.0
                incidents += 1
            if env.done:
                b_done[t, i] = 1.0
                snap = env.reset(seed=int(env_seed_rng.integers(2**31)))
            obs[i] = envlab.snapshot_to_obs(env_id, snap)
    b_val[T] = mlp_forward(value_net.params, value_net.sizes, obs * obs_scale)[0][:, 0]

    batch = {
        "obs": b_obs,
        "actions": b_act,
        "rewards": b_rew,
        "dones": b_done,
        "logp": b_logp,
        "values": b_val,
    }
    return batch, obs, incidents


def batch_hash(batch: dict) -> str:
    """Stable digest of a rollout batch (determinism checks)."""
    h = hashlib.sha256()
    for key in sorted(batch):
        h.update(key.encode())
        h.update(np.ascontiguousarray(batch[key]).tobytes())
    return h.hexdigest()
