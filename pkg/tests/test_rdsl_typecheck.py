import numpy as np
import pytest

from t2r import envlab
from t2r.rdsl import evaluate, parse, typecheck
from t2r.rdsl.errors import RdslError
from t2r.rdsl.randprog import random_snapshot
from t2r.schema import SCALAR


def _tc(body: str, schema):
    source = "def compute_dense_reward(action):\n" + body
    return typecheck(parse(source), schema, source)


def test_norm_of_vec_difference_is_scalar(lift_schema):
    typed = _tc("    reward = norm(cubeA.pose.p - robot.ee_pose.p)\n    return reward\n",
                lift_schema)
    ret = typed.program.body[-1]
    assert typed.expr_types[id(ret.expr)] == SCALAR


def test_vec3_plus_quat_is_type_shape_error(lift_schema):
    with pytest.raises(RdslError) as exc:
        _tc("    reward = norm(cubeA.pose.p + cubeA.pose.q)\n    return reward\n", lift_schema)
    assert exc.value.category == "TypeShapeError"
    assert "vec3" in exc.value.message and "quat" in exc.value.message


def test_attribute_hallucination_is_unknown_path(lift_schema):
    with pytest.raises(RdslError) as exc:
        _tc("    reward = self.faucet.handle.qpos\n    return reward\n", lift_schema)
    assert exc.value.category == "UnknownPath"
    assert exc.value.failed_name == "faucet"


def test_unknown_builtin_and_foreign_package(lift_schema):
    with pytest.raises(RdslError) as exc:
        _tc("    reward = cosine_sim(cubeA.pose.p, robot.ee_pose.p)\n    return reward\n",
            lift_schema)
    assert exc.value.category == "UnknownFunction"

    with pytest.raises(RdslError) as exc:
        _tc("    reward = np.linalg.norm(cubeA.pose.p)\n    return reward\n", lift_schema)
    assert exc.value.category == "UnknownFunction"


def test_method_typo_on_entity_is_unknown_path(lift_schema):
    with pytest.raises(RdslError) as exc:
        _tc("    reward = 1.0 if robot.check_grap(cubeA) else 0.0\n    return reward\n",
            lift_schema)
    assert exc.value.category == "UnknownPath"


def test_method_arity_and_argument_types(lift_schema):
    with pytest.raises(RdslError) as exc:
        _tc("    reward = 1.0 if robot.check_grasp() else 0.0\n    return reward\n", lift_schema)
    assert exc.value.category == "TypeShapeError"

    with pytest.raises(RdslError) as exc:
        _tc("    reward = 1.0 if robot.check_grasp(cube_half_size) else 0.0\n    return reward\n",
            lift_schema)
    assert exc.value.category == "TypeShapeError"


def test_augmented_assignment_to_undefined_variable(lift_schema):
    with pytest.raises(RdslError) as exc:
        _tc("    bonus += 1.0\n    return 0.0\n", lift_schema)
    assert exc.value.category == "UnknownPath"


def test_branch_type_conflict(lift_schema):
    body = (
        "    reward = 0.0\n"
        "    if robot.check_grasp(cubeA):\n"
        "        x = 1.0\n"
        "    else:\n"
        "        x = cubeA.pose.p\n"
        "    reward += norm(x)\n"
        "    return reward\n"
    )
    with pytest.raises(RdslError) as exc:
        _tc(body, lift_schema)
    assert exc.value.category == "TypeShapeError"
    assert "inconsistent" in exc.value.message


def test_variable_defined_in_single_branch_is_unavailable(lift_schema):
    body = (
        "    reward = 0.0\n"
        "    if robot.check_grasp(cubeA):\n"
        "        bonus = 1.0\n"
        "    reward += bonus\n"
        "    return reward\n"
    )
    with pytest.raises(RdslError) as exc:
        _tc(body, lift_schema)
    assert exc.value.category == "UnknownPath"


def test_fall_through_requires_scalar_reward(lift_schema):
    with pytest.raises(RdslError) as exc:
        _tc("    x = 1.0\n", lift_schema)
    assert exc.value.category == "TypeShapeError"
    # fall-through with a scalar reward variable is the accepted contract
    typed = _tc("    reward = 1.0\n    reward += 2.0\n", lift_schema)
    assert typed.falls_through


def test_early_return_in_all_branches_is_terminal(lift_schema):
    body = (
        "    if robot.check_grasp(cubeA):\n"
        "        return 1.0\n"
        "    else:\n"
        "        return 0.0\n"
    )
    typed = _tc(body, lift_schema)
    assert not typed.falls_through


def test_return_must_be_scalar(lift_schema):
    with pytest.raises(RdslError) as exc:
        _tc("    return cubeA.pose.p\n", lift_schema)
    assert exc.value.category == "TypeShapeError"


def test_action_rebinding_allowed(lift_schema):
    typed = _tc("    action = clip(action, -1, 1)\n    reward = sum(action ** 2)\n    return reward\n",
                lift_schema)
    assert typed is not None


def test_index_out_of_range_is_static_shape_error(lift_schema):
    with pytest.raises(RdslError) as exc:
        _tc("    reward = cubeA.pose.p[7]\n    return reward\n", lift_schema)
    assert exc.value.category == "TypeShapeError"


def test_typecheck_soundness_over_random_snapshots(lift_schema):
    # any program that typechecks never hits path/function/shape failures at
    # runtime; DomainError remains possible
    source = envlab.fixture_source("liftcube_zero_shot")
    typed = typecheck(parse(source), lift_schema, source)
    rng = np.random.default_rng(3)
    for _ in range(200):
        snap = random_snapshot(lift_schema, rng)
        action = rng.uniform(-1, 1, lift_schema.action_dim)
        try:
            evaluate(typed, snap, action)
        except RdslError as err:
            assert err.category == "DomainError"
