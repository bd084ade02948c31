"""The ported generation-sample programs: all sixteen parse, typecheck against
their environment schema, and evaluate finitely."""

import math

import numpy as np
import pytest

from t2r import envlab
from t2r import schema as sch
from t2r.rdsl import evaluate, parse, typecheck
from t2r.rdsl.errors import RdslError
from t2r.rdsl.randprog import random_snapshot

# the sixteen ported samples (see also the pushchair fixture below)
PORTED = [
    "liftcube_zero_shot", "liftcube_few_shot", "liftcube_oracle",
    "pickcube_zero_shot", "pickcube_few_shot", "pickcube_oracle",
    "opendrawer_zero_shot", "opendrawer_few_shot",
    "stackcube_iter0", "stackcube_iter1", "stackcube_iter2",
    "mover_frontflip", "mover_backflip", "mover_liedown", "mover_waveleg",
]


def _pushchair():
    from importlib import resources
    from pathlib import Path

    base = Path(resources.files("t2r.envlab") / "data" / "fixtures")
    schema = sch.load_schema(base / "pushchair_lite.json")
    source = (base / "pushchair_zero_shot.rdsl").read_text(encoding="utf-8")
    return schema, source


def _all_sixteen():
    out = []
    for name in PORTED:
        source = envlab.fixture_source(name)
        schema = envlab.env_schema(envlab.rewards.fixture_env_id(name))
        out.append((name, schema, source))
    schema, source = _pushchair()
    out.append(("pushchair_zero_shot", schema, source))
    return out


def test_sixteen_samples_exist():
    assert len(_all_sixteen()) == 16


@pytest.mark.parametrize("name,schema,source", _all_sixteen(),
                         ids=[x[0] for x in _all_sixteen()])
def test_port_parses_typechecks_and_evaluates_finitely(name, schema, source):
    typed = typecheck(parse(source), schema, source)
    rng = np.random.default_rng(abs(hash(name)) % 2**31)
    finite = 0
    for _ in range(100):
        snap = random_snapshot(schema, rng)
        action = rng.uniform(-1, 1, schema.action_dim)
        try:
            value = evaluate(typed, snap, action)
        except RdslError as err:
            # random states may legitimately hit math-domain edges
            assert err.category == "DomainError"
            continue
        assert math.isfinite(value)
        finite += 1
    assert finite >= 95, f"{name}: only {finite}/100 snapshots evaluated finitely"


def test_every_fixture_path_resolves():
    # every dotted path in every ported program resolves against its schema
    from t2r.rdsl import nodes as N

    def paths_of(node, out):
        if isinstance(node, N.PathRef):
            out.append(node.parts)
        if isinstance(node, N.Call) and len(node.func) > 1:
            out.append(node.func)
        for field_name in getattr(node, "__dataclass_fields__", {}):
            value = getattr(node, field_name)
            if isinstance(value, N.Node):
                paths_of(value, out)
            elif isinstance(value, tuple):
                for item in value:
                    if isinstance(item, N.Node):
                        paths_of(item, out)
                    elif isinstance(item, tuple):
                        for sub in item:
                            if isinstance(sub, N.Node):
                                paths_of(sub, out)
                            elif isinstance(sub, tuple):
                                for s2 in sub:
                                    if isinstance(s2, N.Node):
                                        paths_of(s2, out)
        return out

    for name, schema, source in _all_sixteen():
        prog = parse(source)
        for st in prog.body:
            for parts in paths_of(st, []):
                sch.resolve_path(schema, parts)  # raises UnknownPath on failure


def test_oracles_load_for_every_env():
    for env_id in envlab.ENV_IDS:
        typed = envlab.oracle_reward(env_id)
        assert typed.schema.env_id == env_id


def test_lift_oracle_at_reset_is_reaching_only():
    env = envlab.make_env("liftcube_lite")
    snap = env.reset(seed=5)
    typed = envlab.oracle_reward("liftcube_lite")
    value = evaluate(typed, snap, np.zeros(4))
    assert 0.0 < value < 1.0  # far and ungrasped: only the reaching term


def test_drawer_zero_shot_finite_at_reset():
    env = envlab.make_env("opendrawer_lite")
    snap = env.reset(seed=5)
    typed = envlab.fixture_reward("opendrawer_zero_shot")
    value = evaluate(typed, snap, np.zeros(4))
    assert math.isfinite(value)
