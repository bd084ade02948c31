"""SAC: tanh-squashed Gaussian actor, twin critics, automatic temperature.

All updates are hand-derived flat-vector backprop. Loss functions are pure
given their sampled noise, which is passed in explicitly so central finite
differences can validate every gradient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import AlgoConfig
from .nets import Adam, MlpNet, check_finite, mlp_backward, mlp_forward, polyak_update

LOG_2PI = float(np.log(2.0 * np.pi))
LOG_STD_MIN, LOG_STD_MAX = -20.0, 2.0
SQUASH_EPS = 1e-6


@dataclass
class SquashedGaussianPolicy:
    """Actor network producing [mean | log_std] with tanh squashing."""

    sizes: tuple[int, ...]  # output = 2 * action_dim
    params: np.ndarray

    @classmethod
    def create(cls, obs_dim: int, action_dim: int, hidden: int, layers: int,
               rng: np.random.Generator, dtype=np.float32) -> "SquashedGaussianPolicy":
        sizes = (obs_dim, *([hidden] * layers), 2 * action_dim)
        return cls(sizes=sizes, params=MlpNet.create(sizes, rng, dtype).params)

    @property
    def action_dim(self) -> int:
        return self.sizes[-1] // 2

    def heads(self, obs: np.ndarray, flat: np.ndarray | None = None):
        flat = self.params if flat is None else flat
        out, cache = mlp_forward(flat, self.sizes, obs)
        d = self.action_dim
        mean = out[:, :d]
        log_std_raw = out[:, d:]
        log_std = np.clip(log_std_raw, LOG_STD_MIN, LOG_STD_MAX)
        return mean, log_std, log_std_raw, cache

    def act(self, obs: np.ndarray, rng: np.random.Generator, stochastic: bool = True) -> np.ndarray:
        mean, log_std, _, _ = self.heads(np.atleast_2d(obs))
        if not stochastic:
            return np.tanh(mean[0])
        noise = rng.standard_normal(self.action_dim)
        return np.tanh(mean[0] + np.exp(log_std[0]) * noise)


def squash_sample(mean, log_std, noise):
    """a = tanh(mean + std*noise) plus log pi(a|s); elementwise float64."""
    std = np.exp(log_std)
    u = mean + std * noise
    a = np.tanh(u)
    logp = (
        -0.5 * noise * noise - log_std - 0.5 * LOG_2PI
        - np.log(1.0 - a * a + SQUASH_EPS)
    ).sum(axis=1)
    return a, logp


def _squash_grads(a, log_std, noise, alpha_coef, dL_da):
    """Backprop through a = tanh(u), u = mean + exp(log_std)*noise, for a loss
    alpha_coef * logp + <dL_da, a>. Returns (dmean, dlog_std) per sample."""
    one_minus_a2 = 1.0 - a * a
    phi = 2.0 * a * one_minus_a2 / (one_minus_a2 + SQUASH_EPS)  # dlogp/du
    sigma_eps = np.exp(log_std) * noise                          # du/dlog_std
    dmean = alpha_coef * phi + dL_da * one_minus_a2
    dlog_std = alpha_coef * (-1.0 + phi * sigma_eps) + dL_da * one_minus_a2 * sigma_eps
    return dmean, dlog_std


@dataclass
class SacNets:
    actor: SquashedGaussianPolicy
    q1: MlpNet
    q2: MlpNet
    q1_target: MlpNet
    q2_target: MlpNet
    log_alpha: float

    @classmethod
    def create(cls, obs_dim: int, action_dim: int, cfg: AlgoConfig,
               rng: np.random.Generator, dtype=np.float32) -> "SacNets":
        actor = SquashedGaussianPolicy.create(obs_dim, action_dim, cfg.hidden, cfg.layers, rng, dtype)
        q_sizes = (obs_dim + action_dim, *([cfg.hidden] * cfg.layers), 1)
        q1 = MlpNet.create(q_sizes, rng, dtype)
        q2 = MlpNet.create(q_sizes, rng, dtype)
        return cls(actor=actor, q1=q1, q2=q2, q1_target=q1.copy(), q2_target=q2.copy(),
                   log_alpha=float(np.log(cfg.init_temperature)))

    @property
    def alpha(self) -> float:
        return float(np.exp(self.log_alpha))


@dataclass
class SacUpdateStats:
    critic_loss: float
    actor_loss: float
    alpha_loss: float
    alpha: float
    mean_q: float
    mean_logp: float


def compute_targets(nets: SacNets, batch: dict, noise_next: np.ndarray, cfg: AlgoConfig) -> np.ndarray:
    """Twin-critic entropy-regularized Bellman targets (no gradients)."""
    mean, log_std, _, _ = nets.actor.heads(batch["next_obs"])
    a_next, logp_next = squash_sample(mean, log_std, noise_next)
    x_next = np.concatenate([batch["next_obs"], a_next], axis=1)
    q1t, _ = mlp_forward(nets.q1_target.params, nets.q1_target.sizes, x_next)
    q2t, _ = mlp_forward(nets.q2_target.params, nets.q2_target.sizes, x_next)
    q_min = np.minimum(q1t[:, 0], q2t[:, 0])
    return batch["rewards"] + cfg.gamma * (1.0 - batch["dones"]) * (
        q_min - nets.alpha * logp_next
    )


def critic_loss_and_grads(nets: SacNets, batch: dict, y: np.ndarray,
                          q1_flat=None, q2_flat=None):
    """MSE of both critics against targets y; grads wrt each critic's params."""
    q1_flat = nets.q1.params if q1_flat is None else q1_flat
    q2_flat = nets.q2.params if q2_flat is None else q2_flat
    x = np.concatenate([batch["obs"], batch["actions"]], axis=1)
    B = x.shape[0]
    q1, c1 = mlp_forward(q1_flat, nets.q1.sizes, x)
    q2, c2 = mlp_forward(q2_flat, nets.q2.sizes, x)
    e1 = q1[:, 0] - y
    e2 = q2[:, 0] - y
    loss = float(np.mean(e1 * e1) + np.mean(e2 * e2))
    d1, _ = mlp_backward(q1_flat, nets.q1.sizes, c1, (2.0 * e1 / B)[:, None].astype(q1_flat.dtype))
    d2, _ = mlp_backward(q2_flat, nets.q2.sizes, c2, (2.0 * e2 / B)[:, None].astype(q2_flat.dtype))
    return loss, d1, d2, float(np.mean((q1[:, 0] + q2[:, 0]) / 2.0))


def actor_loss_and_grads(nets: SacNets, batch: dict, noise: np.ndarray,
                         actor_flat=None):
    """E[alpha*logp - min(Q1, Q2)] with reparameterized actions; grads wrt the
    actor parameters only (critics held fixed)."""
    actor_flat = nets.actor.params if actor_flat is None else actor_flat
    obs = batch["obs"]
    B = obs.shape[0]
    d = nets.actor.action_dim
    mean, log_std, log_std_raw, cache = nets.actor.heads(obs, actor_flat)
    a, logp = squash_sample(mean, log_std, noise)
    x = np.concatenate([obs, a], axis=1)
    q1, c1 = mlp_forward(nets.q1.params, nets.q1.sizes, x)
    q2, c2 = mlp_forward(nets.q2.params, nets.q2.sizes, x)
    take1 = q1[:, 0] <= q2[:, 0]
    q_min = np.where(take1, q1[:, 0], q2[:, 0])
    alpha = float(np.exp(nets.log_alpha))
    loss = float(np.mean(alpha * logp - q_min))

    # dL/da via the critic that realized the min, per sample
    dq = np.zeros((B, 1), dtype=nets.q1.params.dtype)
    dq[take1, 0] = -1.0 / B
    _, dx1 = mlp_backward(nets.q1.params, nets.q1.sizes, c1, dq)
    dq2 = np.zeros((B, 1), dtype=nets.q2.params.dtype)
    dq2[~take1, 0] = -1.0 / B
    _, dx2 = mlp_backward(nets.q2.params, nets.q2.sizes, c2, dq2)
    dL_da = (dx1 + dx2)[:, obs.shape[1]:]

    dmean, dlog_std = _squash_grads(a, log_std, noise, alpha / B, dL_da)
    # clip mask: no gradient where the raw log-std was clamped
    mask = (log_std_raw > LOG_STD_MIN) & (log_std_raw < LOG_STD_MAX)
    dout = np.concatenate([dmean, dlog_std * mask], axis=1)
    dactor, _ = mlp_backward(actor_flat, nets.actor.sizes, cache, dout.astype(actor_flat.dtype))
    return loss, dactor, logp


def alpha_loss_and_grad(log_alpha: float, logp: np.ndarray, target_entropy: float):
    """Temperature loss -log_alpha * mean(logp + target_entropy); logp is
    treated as a constant."""
    gap = float(np.mean(logp + target_entropy))
    loss = -log_alpha * gap
    return loss, -gap


@dataclass
class SacOptimizers:
    actor: Adam
    q1: Adam
    q2: Adam
    alpha: Adam
    updates: int = 0

    @classmethod
    def create(cls, nets: SacNets, cfg: AlgoConfig) -> "SacOptimizers":
        return cls(
            actor=Adam(nets.actor.params.size, cfg.lr, cfg.adam_betas, cfg.adam_eps),
            q1=Adam(nets.q1.params.size, cfg.lr, cfg.adam_betas, cfg.adam_eps),
            q2=Adam(nets.q2.params.size, cfg.lr, cfg.adam_betas, cfg.adam_eps),
            alpha=Adam(1, cfg.lr, cfg.adam_betas, cfg.adam_eps),
        )


def sac_update(nets: SacNets, opts: SacOptimizers, batch: dict,
               rng: np.random.Generator, cfg: AlgoConfig) -> SacUpdateStats:
    """One gradient step on critics, actor, and temperature, plus the Polyak
    target blend at the configured frequency."""
    B, d = batch["obs"].shape[0], nets.actor.action_dim
    noise_next = rng.standard_normal((B, d))
    noise_cur = rng.standard_normal((B, d))

    y = compute_targets(nets, batch, noise_next, cfg)
    c_loss, dq1, dq2, mean_q = critic_loss_and_grads(nets, batch, y)
    check_finite("sac_critic", loss=np.array(c_loss), dq1=dq1, dq2=dq2)
    opts.q1.step(nets.q1.params, dq1)
    opts.q2.step(nets.q2.params, dq2)

    a_loss, dactor, logp = actor_loss_and_grads(nets, batch, noise_cur)
    check_finite("sac_actor", loss=np.array(a_loss), dactor=dactor)
    opts.actor.step(nets.actor.params, dactor)

    target_entropy = -cfg.target_entropy_scale * d
    al_loss, dlog_alpha = alpha_loss_and_grad(nets.log_alpha, logp, target_entropy)
    la = np.array([nets.log_alpha], dtype=np.float64)
    opts.alpha.step(la, np.array([dlog_alpha], dtype=np.float64))
    nets.log_alpha = float(la[0])

    opts.updates += 1
    if opts.updates % cfg.target_update_freq == 0:
        polyak_update(nets.q1_target.params, nets.q1.params, cfg.tau)
        polyak_update(nets.q2_target.params, nets.q2.params, cfg.tau)

    return SacUpdateStats(
        critic_loss=c_loss, actor_loss=a_loss, alpha_loss=al_loss,
        alpha=nets.alpha, mean_q=mean_q, mean_logp=float(np.mean(logp)),
    )


class ReplayBuffer:
    """Preallocated FIFO ring with uniform sampling."""

    def __init__(self, capacity: int, obs_dim: int, action_dim: int, dtype=np.float32):
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_dim), dtype=dtype)
        self.next_obs = np.zeros((capacity, obs_dim), dtype=dtype)
        self.actions = np.zeros((capacity, action_dim), dtype=dtype)
        self.rewards = np.zeros(capacity, dtype=dtype)
        self.dones = np.zeros(capacity, dtype=dtype)
        self.ptr = 0
        self.size = 0

    def add(self, obs, action, reward, next_obs, done) -> None:
        i = self.ptr
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_obs[i] = next_obs
        self.dones[i] = float(done)
        self.ptr = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> dict:
        idx = rng.integers(0, self.size, size=batch_size)
        return {
            "obs": self.obs[idx],
            "actions": self.actions[idx],
            "rewards": self.rewards[idx],
            "next_obs": self.next_obs[idx],
            "dones": self.dones[idx],
        }
