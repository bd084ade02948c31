"""Desk-scale deterministic environments with kinematic grasping.

Five environments expose the same abstraction surface as full manipulation/
locomotion benchmarks at a fraction of the compute: liftcube_lite,
pickcube_lite, stackcube_lite, opendrawer_lite, and mover_lite. Dynamics are
kinematic with a boolean attachment grasp model; success predicates are
programmatic and independent of any reward program.
"""

from ..state import StateSnapshot
from .base import DeskEnv, ENV_IDS, make_env, env_schema, reset, step, success
from .obs import snapshot_to_obs, obs_dim, OBS_LAYOUT_VERSION
from .rewards import oracle_reward, fixture_reward, fixture_source, list_fixtures

__all__ = [
    "StateSnapshot",
    "DeskEnv",
    "ENV_IDS",
    "make_env",
    "env_schema",
    "reset",
    "step",
    "success",
    "snapshot_to_obs",
    "obs_dim",
    "OBS_LAYOUT_VERSION",
    "oracle_reward",
    "fixture_reward",
    "fixture_source",
    "list_fixtures",
]
