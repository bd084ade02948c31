"""PPO: diagonal-Gaussian policy, GAE, clipped-surrogate updates.

The policy parameter vector is [mlp params | state-independent log-std]. All
loss gradients are hand-derived and validated against central finite
differences by the acceptance suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import AlgoConfig
from .nets import Adam, MlpNet, check_finite, mlp_backward, mlp_forward, param_count

LOG_2PI = float(np.log(2.0 * np.pi))


class LengthMismatch(Exception):
    pass


def gae(rewards, values, dones, gamma: float, lam: float):
    """Generalized advantage estimation.

    values has one more entry than rewards (bootstrap value of the final
    state); dones flag transitions into terminal states. Returns
    (advantages, returns) with returns = advantages + values[:-1].
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    dones = np.asarray(dones, dtype=np.float64)
    if values.shape[0] != rewards.shape[0] + 1:
        raise LengthMismatch(
            f"values must have len(rewards)+1 entries, got {values.shape[0]} vs {rewards.shape[0]}"
        )
    if dones.shape[0] != rewards.shape[0]:
        raise LengthMismatch("dones must align with rewards")
    T = rewards.shape[0]
    advantages = np.zeros(T, dtype=np.float64)
    last = 0.0
    for t in range(T - 1, -1, -1):
        nonterminal = 1.0 - dones[t]
        delta = rewards[t] + gamma * nonterminal * values[t + 1] - values[t]
        last = delta + gamma * lam * nonterminal * last
        advantages[t] = last
    return advantages, advantages + values[:-1]


@dataclass
class GaussianPolicy:
    """Unsquashed diagonal Gaussian; the environment clips sampled actions."""

    sizes: tuple[int, ...]
    params: np.ndarray  # [mlp | log_std(action_dim)]

    @classmethod
    def create(cls, obs_dim: int, action_dim: int, hidden: int, layers: int,
               rng: np.random.Generator, dtype=np.float32) -> "GaussianPolicy":
        sizes = (obs_dim, *([hidden] * layers), action_dim)
        mlp = MlpNet.create(sizes, rng, dtype)
        log_std = np.full(action_dim, -0.5, dtype=dtype)
        return cls(sizes=sizes, params=np.concatenate([mlp.params, log_std]))

    @property
    def action_dim(self) -> int:
        return self.sizes[-1]

    def split(self, flat: np.ndarray | None = None):
        flat = self.params if flat is None else flat
        n = param_count(self.sizes)
        return flat[:n], flat[n:]

    def mean(self, obs: np.ndarray) -> np.ndarray:
        mlp_flat, _ = self.split()
        out, _ = mlp_forward(mlp_flat, self.sizes, np.atleast_2d(obs))
        return out

    def act(self, obs: np.ndarray, rng: np.random.Generator, stochastic: bool = True) -> np.ndarray:
        mu = self.mean(obs)[0]
        if not stochastic:
            return np.clip(mu, -1.0, 1.0)
        _, log_std = self.split()
        std = np.exp(np.asarray(log_std, dtype=np.float64))
        return np.clip(mu + std * rng.standard_normal(self.action_dim), -1.0, 1.0)

    def log_prob(self, obs: np.ndarray, actions: np.ndarray) -> np.ndarray:
        mlp_flat, log_std = self.split()
        mu, _ = mlp_forward(mlp_flat, self.sizes, obs)
        log_std = np.asarray(log_std, dtype=np.float64)
        z = (actions - mu) / np.exp(log_std)
        return (-0.5 * z * z - log_std - 0.5 * LOG_2PI).sum(axis=1)


@dataclass
class UpdateStats:
    policy_loss: float
    value_loss: float
    entropy: float
    approx_kl: float
    clip_fraction: float
    epochs_run: int
    total_loss: float


def ppo_loss_and_grads(
    policy: GaussianPolicy,
    value_net: MlpNet,
    policy_flat: np.ndarray,
    value_flat: np.ndarray,
    mb: dict,
    cfg: AlgoConfig,
):
    """Total clipped-surrogate + value + entropy loss and its gradients for
    one minibatch; pure in (params, minibatch)."""
    obs = mb["obs"]
    actions = mb["actions"]
    adv = mb["advantages"]
    returns = mb["returns"]
    logp_old = mb["logp"]
    B = obs.shape[0]

    n_mlp = param_count(policy.sizes)
    mlp_flat, log_std = policy_flat[:n_mlp], policy_flat[n_mlp:]
    log_std64 = np.asarray(log_std, dtype=np.float64)
    std = np.exp(log_std64)

    mu, cache = mlp_forward(mlp_flat, policy.sizes, obs)
    z = (actions - mu) / std
    logp = (-0.5 * z * z - log_std64 - 0.5 * LOG_2PI).sum(axis=1)

    ratio = np.exp(logp - logp_old)
    unclipped = ratio * adv
    clipped = np.clip(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps) * adv
    take_unclipped = unclipped <= clipped
    pg_loss = -np.mean(np.minimum(unclipped, clipped))

    entropy = float(np.sum(log_std64 + 0.5 * (LOG_2PI + 1.0)))

    v, vcache = mlp_forward(value_flat, value_net.sizes, obs)
    v = v[:, 0]
    v_err = v - returns
    value_loss = float(np.mean(v_err * v_err))

    total = pg_loss + cfg.vf_coef * value_loss - cfg.ent_coef * entropy

    # gradient wrt logp: only samples whose min() routes through ratio*adv
    # (inside the clip band the two branches coincide)
    inside_band = np.abs(ratio - 1.0) <= cfg.clip_eps
    active = take_unclipped | inside_band
    dlogp = np.where(active, -(ratio * adv) / B, 0.0)

    dmu = dlogp[:, None] * (z / std)                       # dlogp/dmu = z/std
    dlog_std_per = dlogp[:, None] * (z * z - 1.0)          # dlogp/dlog_std = z^2-1
    dlog_std = dlog_std_per.sum(axis=0) - cfg.ent_coef * 1.0  # entropy bonus grad
    dmlp, _ = mlp_backward(mlp_flat, policy.sizes, cache, dmu.astype(mlp_flat.dtype))
    dpolicy = np.concatenate([dmlp, dlog_std.astype(policy_flat.dtype)])

    dv = (cfg.vf_coef * 2.0 * v_err / B)[:, None]
    dvalue, _ = mlp_backward(value_flat, value_net.sizes, vcache, dv.astype(value_flat.dtype))

    approx_kl = float(np.mean((ratio - 1.0) - np.log(np.maximum(ratio, 1e-12))))
    clip_fraction = float(np.mean(np.abs(ratio - 1.0) > cfg.clip_eps))
    stats = UpdateStats(
        policy_loss=float(pg_loss), value_loss=value_loss, entropy=entropy,
        approx_kl=approx_kl, clip_fraction=clip_fraction, epochs_run=0,
        total_loss=float(total),
    )
    return stats, dpolicy, dvalue


def ppo_update(
    policy: GaussianPolicy,
    value_net: MlpNet,
    opt_policy: Adam,
    opt_value: Adam,
    batch: dict,
    cfg: AlgoConfig,
    rng: np.random.Generator,
) -> UpdateStats:
    """Runs cfg.epochs passes of minibatch updates with advantage
    normalization; stops the epoch loop early once the average KL estimate
    exceeds the configured target."""
    n = batch["obs"].shape[0]
    adv = batch["advantages"]
    batch = dict(batch)
    batch["advantages"] = (adv - adv.mean()) / (adv.std() + 1e-8)

    last_stats: UpdateStats | None = None
    epochs_run = 0
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        kls = []
        for start in range(0, n, cfg.minibatch_size):
            idx = order[start : start + cfg.minibatch_size]
            mb = {k: v[idx] for k, v in batch.items()}
            stats, dpolicy, dvalue = ppo_loss_and_grads(
                policy, value_net, policy.params, value_net.params, mb, cfg
            )
            check_finite("ppo_update", total_loss=np.array(stats.total_loss),
                         dpolicy=dpolicy, dvalue=dvalue)
            opt_policy.step(policy.params, dpolicy)
            opt_value.step(value_net.params, dvalue)
            kls.append(stats.approx_kl)
            last_stats = stats
        epochs_run = epoch + 1
        if cfg.target_kl is not None and float(np.mean(kls)) > cfg.target_kl:
            break
    assert last_stats is not None
    last_stats.epochs_run = epochs_run
    return last_stats
