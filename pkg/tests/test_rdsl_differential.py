"""Differential agreement between the evaluator and the naive reference
interpreter on randomized typed programs (the full 1000x100 sweep runs in the
acceptance suite; this is the fast everyday slice)."""

import numpy as np
import pytest

from t2r import envlab
from t2r.rdsl import evaluate, parse, reference_evaluate, typecheck
from t2r.rdsl.errors import RdslError
from t2r.rdsl.randprog import ProgramGenerator, random_snapshot
from t2r.rdsl.reference import ReferenceDomainError

ENVS = ["liftcube_lite", "pickcube_lite", "stackcube_lite", "opendrawer_lite", "mover_lite"]


def _outcome_main(typed, snap, action):
    try:
        return ("value", evaluate(typed, snap, action))
    except RdslError as err:
        assert err.category == "DomainError"
        return ("domain", None)


def _outcome_ref(prog, snap, action):
    try:
        return ("value", reference_evaluate(prog, snap, action))
    except ReferenceDomainError:
        return ("domain", None)


@pytest.mark.parametrize("env_id", ENVS)
def test_differential_random_programs(env_id):
    schema = envlab.env_schema(env_id)
    rng = np.random.default_rng(hash(env_id) % 2**31)
    gen = ProgramGenerator(schema, rng)
    snapshots = [
        (random_snapshot(schema, rng), rng.uniform(-1, 1, schema.action_dim))
        for _ in range(20)
    ]
    for _ in range(40):
        source = gen.generate()
        typed = typecheck(parse(source), schema, source)
        for snap, action in snapshots:
            main = _outcome_main(typed, snap, action)
            ref = _outcome_ref(typed.program, snap, action)
            assert main[0] == ref[0], (source, main, ref)
            if main[0] == "value":
                assert abs(main[1] - ref[1]) < 1e-9, (source, main[1], ref[1])


def test_differential_on_ported_fixtures():
    rng = np.random.default_rng(99)
    for name in envlab.list_fixtures():
        typed = envlab.fixture_reward(name)
        schema = typed.schema
        for _ in range(25):
            snap = random_snapshot(schema, rng)
            action = rng.uniform(-1, 1, schema.action_dim)
            main = _outcome_main(typed, snap, action)
            ref = _outcome_ref(typed.program, snap, action)
            assert main[0] == ref[0], (name, main, ref)
            if main[0] == "value":
                assert abs(main[1] - ref[1]) < 1e-9, (name, main[1], ref[1])
