import pytest

from t2r.rdsl import classify_error, parse, typecheck
from t2r.rdsl.errors import (
    HALLUCINATION,
    MISUSE,
    SYNTAX_SHAPE,
    WRONG_PACKAGE,
    RdslError,
)


def _error_for(body: str, schema) -> RdslError:
    source = "def compute_dense_reward(action):\n" + body + "    return 0.0\n"
    with pytest.raises(RdslError) as exc:
        typecheck(parse(source), schema, source)
    return exc.value


def test_misuse_name_exists_elsewhere(drawer_schema):
    # 'handle' exists on the cabinet, not the robot
    err = _error_for("    x = robot.handle\n", drawer_schema)
    assert err.category == "UnknownPath"
    assert classify_error(err, drawer_schema) == MISUSE


def test_misuse_gripper_attr_on_cube(lift_schema):
    err = _error_for("    x = cubeA.gripper_openness\n", lift_schema)
    assert classify_error(err, lift_schema) == MISUSE


def test_hallucination_name_nowhere(lift_schema):
    err = _error_for("    x = cubeA.mass_center\n", lift_schema)
    assert classify_error(err, lift_schema) == HALLUCINATION


def test_hallucinated_entity(lift_schema):
    err = _error_for("    x = self.faucet.handle.qpos\n", lift_schema)
    assert classify_error(err, lift_schema) == HALLUCINATION


def test_wrong_package(lift_schema):
    err = _error_for("    x = cosine_sim(cubeA.pose.p, robot.ee_pose.p)\n", lift_schema)
    assert err.category == "UnknownFunction"
    assert classify_error(err, lift_schema) == WRONG_PACKAGE


def test_syntax_and_shape_bucket(lift_schema):
    with pytest.raises(RdslError) as exc:
        parse("def compute_dense_reward(action):\n    x = (1.0\n    return 0.0\n")
    assert classify_error(exc.value, lift_schema) == SYNTAX_SHAPE

    err = _error_for("    x = cubeA.pose.p + cubeA.pose.q\n", lift_schema)
    assert classify_error(err, lift_schema) == SYNTAX_SHAPE


def test_report_serialization_shape(lift_schema):
    err = _error_for("    x = cubeA.mass_center\n", lift_schema)
    report = err.report()
    assert set(report) == {"category", "message", "line", "col"}
    assert report["category"] == "UnknownPath"
    assert report["line"] == 2
