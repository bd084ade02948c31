"""Policy optimization: PPO and SAC over flat-parameter MLPs."""

from .config import AlgoConfig, get_config, profiles
from .nets import Adam, MlpNet, NonFiniteLoss, polyak_update
from .ppo import GaussianPolicy, LengthMismatch, gae, ppo_loss_and_grads, ppo_update
from .sac import ReplayBuffer, SacNets, SacOptimizers, SquashedGaussianPolicy, sac_update
from .train import (
    CurveRow,
    LearningCurve,
    Policy,
    RandomPolicy,
    TrainResult,
    episode_rollout,
    evaluate_success,
    load_checkpoint,
    save_checkpoint,
    train,
)

__all__ = [
    "AlgoConfig",
    "get_config",
    "profiles",
    "Adam",
    "MlpNet",
    "NonFiniteLoss",
    "polyak_update",
    "gae",
    "GaussianPolicy",
    "LengthMismatch",
    "ppo_update",
    "ppo_loss_and_grads",
    "ReplayBuffer",
    "SacNets",
    "SacOptimizers",
    "SquashedGaussianPolicy",
    "sac_update",
    "Policy",
    "RandomPolicy",
    "TrainResult",
    "LearningCurve",
    "CurveRow",
    "train",
    "evaluate_success",
    "episode_rollout",
    "save_checkpoint",
    "load_checkpoint",
]
