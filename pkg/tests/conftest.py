import numpy as np
import pytest

from t2r import envlab
from t2r import schema as sch


@pytest.fixture(scope="session")
def lift_schema():
    return envlab.env_schema("liftcube_lite")


@pytest.fixture(scope="session")
def stack_schema():
    return envlab.env_schema("stackcube_lite")


@pytest.fixture(scope="session")
def drawer_schema():
    return envlab.env_schema("opendrawer_lite")


@pytest.fixture()
def lift_snapshot_success(lift_schema):
    """Cube lifted above goal_height + half, robot static, grasped."""
    from t2r.state import StateSnapshot

    values = {
        "cubeA.pose.p": np.array([0.0, 0.0, 0.23]),
        "cubeA.pose.q": np.array([1.0, 0.0, 0.0, 0.0]),
        "cubeA.velocity": np.zeros(3),
        "cube_half_size": 0.02,
        "goal_height": 0.2,
        "robot.ee_pose.p": np.array([0.0, 0.0, 0.23]),
        "robot.ee_pose.q": np.array([1.0, 0.0, 0.0, 0.0]),
        "robot.qpos": np.array([0.0, 0.0, 0.23, 0.1]),
        "robot.qvel": np.zeros(4),
        "robot.gripper_openness": 0.1,
    }
    return StateSnapshot.create("liftcube_lite", 10, values, grasped_object="cubeA")


@pytest.fixture()
def lift_snapshot_reaching(lift_schema):
    """Ungrasped, gripper 0.2 m from the cube on the table."""
    from t2r.state import StateSnapshot

    values = {
        "cubeA.pose.p": np.array([0.2, 0.0, 0.02]),
        "cubeA.pose.q": np.array([1.0, 0.0, 0.0, 0.0]),
        "cubeA.velocity": np.zeros(3),
        "cube_half_size": 0.02,
        "goal_height": 0.2,
        "robot.ee_pose.p": np.array([0.0, 0.0, 0.02]),
        "robot.ee_pose.q": np.array([1.0, 0.0, 0.0, 0.0]),
        "robot.qpos": np.array([0.0, 0.0, 0.02, 1.0]),
        "robot.qvel": np.zeros(4),
        "robot.gripper_openness": 1.0,
    }
    return StateSnapshot.create("liftcube_lite", 0, values)
