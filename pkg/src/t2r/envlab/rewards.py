"""Shipped reward fixtures: task oracles plus ported generation samples."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from ..rdsl import TypedProgram, parse, typecheck
from .base import _data_dir, env_schema

_ORACLES = {
    "liftcube_lite": "liftcube_oracle",
    "pickcube_lite": "pickcube_oracle",
    "stackcube_lite": "stackcube_iter2",  # the interactive trace's final revision
    "opendrawer_lite": "opendrawer_oracle",
    "mover_lite": "mover_oracle",
}

_FIXTURE_ENV = {
    "liftcube": "liftcube_lite",
    "pickcube": "pickcube_lite",
    "stackcube": "stackcube_lite",
    "opendrawer": "opendrawer_lite",
    "mover": "mover_lite",
}


def _rewards_dir() -> Path:
    return _data_dir() / "rewards"


def list_fixtures() -> list[str]:
    return sorted(p.stem for p in _rewards_dir().glob("*.rdsl"))


def fixture_env_id(name: str) -> str:
    head = name.split("_")[0]
    try:
        return _FIXTURE_ENV[head]
    except KeyError:
        raise KeyError(f"fixture '{name}' does not map to a shipped environment") from None


def fixture_source(name: str) -> str:
    path = _rewards_dir() / f"{name}.rdsl"
    if not path.exists():
        raise KeyError(f"unknown reward fixture '{name}'; shipped: {', '.join(list_fixtures())}")
    return path.read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def fixture_reward(name: str) -> TypedProgram:
    """Load, parse, and typecheck a shipped fixture program by name."""
    source = fixture_source(name)
    schema = env_schema(fixture_env_id(name))
    return typecheck(parse(source), schema, source)


def oracle_reward(env_id: str) -> TypedProgram:
    """The expert reward shipped with an environment (typechecked)."""
    try:
        return fixture_reward(_ORACLES[env_id])
    except KeyError:
        raise KeyError(f"no oracle reward for '{env_id}'") from None
