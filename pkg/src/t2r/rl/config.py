"""Algorithm hyperparameter profiles.

`manip`/`loco` are desk-scale profiles sized for laptop CPUs (small nets,
short learning starts, budgets under 200k environment steps). `paper-manip`/
`paper-loco` carry the original benchmark table values: SAC paper-manip uses
the ManiSkill2 column and paper-loco the MetaWorld column (SAC was only run
on manipulation suites); PPO paper-manip is the ManiSkill2 column and
paper-loco the MuJoCo column.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class AlgoConfig:
    algo: str
    profile: str
    gamma: float
    lr: float = 3e-4
    episode_len: int = 200
    hidden: int = 256
    layers: int = 2
    # SAC
    tau: float = 5e-3
    train_freq: int = 8
    grad_steps: int = 4
    learning_starts: int = 1000
    batch_size: int = 256
    init_temperature: float = 0.2
    target_update_freq: int = 1
    buffer_capacity: int = 200_000
    target_entropy_scale: float = 1.0  # target entropy = -scale * action_dim
    explore_eps: float = 0.0  # fraction of training steps taking a uniform action
    # PPO
    epochs: int = 15
    n_envs: int = 8
    steps_per_update: int = 3200
    minibatch_size: int = 400
    target_kl: float | None = 0.05
    gae_lambda: float = 0.95
    clip_eps: float = 0.2
    ent_coef: float = 0.0
    vf_coef: float = 0.5
    # shared plumbing
    adam_betas: tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8
    eval_every: int = 4000
    eval_episodes: int = 20
    obs_scale: float = 4.0  # fixed input scaling; desk observations live around +-0.25 m

    def as_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> None:
        assert 0.0 < self.gamma <= 1.0, "gamma must be in (0, 1]"
        assert 0.0 < self.tau <= 1.0, "tau must be in (0, 1]"
        assert self.batch_size <= self.buffer_capacity, "batch must fit the buffer"


_PROFILES: dict[tuple[str, str], AlgoConfig] = {}


def _register(cfg: AlgoConfig) -> None:
    cfg.validate()
    _PROFILES[(cfg.algo, cfg.profile)] = cfg


_register(AlgoConfig(
    algo="sac", profile="manip", gamma=0.95, lr=3e-4, episode_len=200,
    hidden=64, layers=2, tau=5e-3, train_freq=8, grad_steps=4,
    learning_starts=1000, batch_size=256, init_temperature=0.2,
    target_update_freq=1, eval_every=4000, explore_eps=0.05,
))
_register(AlgoConfig(
    algo="sac", profile="loco", gamma=0.99, lr=3e-4, episode_len=200,
    hidden=64, layers=2, tau=5e-3, train_freq=8, grad_steps=4,
    learning_starts=1000, batch_size=256, init_temperature=0.1,
    target_update_freq=1, eval_every=4000, explore_eps=0.05,
))
_register(AlgoConfig(
    algo="sac", profile="paper-manip", gamma=0.95, lr=3e-4, episode_len=200,
    hidden=256, layers=2, tau=5e-3, train_freq=8, grad_steps=4,
    learning_starts=4000, batch_size=1024, init_temperature=0.2,
    target_update_freq=1, buffer_capacity=1_000_000, eval_every=10_000,
))
_register(AlgoConfig(
    algo="sac", profile="paper-loco", gamma=0.99, lr=3e-4, episode_len=500,
    hidden=256, layers=3, tau=5e-3, train_freq=1, grad_steps=1,
    learning_starts=4000, batch_size=512, init_temperature=0.1,
    target_update_freq=2, buffer_capacity=1_000_000, eval_every=10_000,
))
_register(AlgoConfig(
    algo="ppo", profile="manip", gamma=0.85, lr=3e-4, episode_len=200,
    hidden=64, layers=2, epochs=15, n_envs=8, steps_per_update=1600,
    minibatch_size=400, target_kl=0.05, gae_lambda=0.95, clip_eps=0.2,
    ent_coef=0.0, vf_coef=0.5, eval_every=4000,
))
_register(AlgoConfig(
    algo="ppo", profile="loco", gamma=0.99, lr=3e-4, episode_len=200,
    hidden=64, layers=2, epochs=10, n_envs=8, steps_per_update=1600,
    minibatch_size=64, target_kl=None, gae_lambda=0.95, clip_eps=0.2,
    ent_coef=0.0, vf_coef=0.5, eval_every=4000,
))
_register(AlgoConfig(
    algo="ppo", profile="paper-manip", gamma=0.85, lr=3e-4, episode_len=100,
    hidden=256, layers=2, epochs=15, n_envs=8, steps_per_update=3200,
    minibatch_size=400, target_kl=0.05, eval_every=12_800,
))
_register(AlgoConfig(
    algo="ppo", profile="paper-loco", gamma=0.99, lr=3e-4, episode_len=200,
    hidden=256, layers=2, epochs=10, n_envs=8, steps_per_update=2048,
    minibatch_size=64, target_kl=None, eval_every=8192,
))


def get_config(algo: str, profile: str, **overrides) -> AlgoConfig:
    try:
        cfg = _PROFILES[(algo, profile)]
    except KeyError:
        known = ", ".join(f"{a}/{p}" for a, p in sorted(_PROFILES))
        raise KeyError(f"no profile '{profile}' for algo '{algo}'; known: {known}") from None
    if overrides:
        cfg = replace(cfg, **overrides)
        cfg.validate()
    return cfg


def profiles() -> list[tuple[str, str]]:
    return sorted(_PROFILES)
