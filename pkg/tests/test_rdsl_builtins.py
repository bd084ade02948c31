import numpy as np
import pytest

from t2r.rdsl.builtins import BUILTINS, DomainViolation


def b(name):
    return BUILTINS[name].impl


def test_cdist_min_point_example():
    pcd = np.array([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]])
    assert b("cdist_min_point")(np.zeros(3), pcd) == 1.0


def test_cdist_min_is_minimum_pairwise():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(5, 3))
    c = rng.normal(size=(7, 3))
    brute = min(np.linalg.norm(p - q) for p in a for q in c)
    assert abs(b("cdist_min")(a, c) - brute) < 1e-12


def test_quat_mul_inverse_is_identity():
    rng = np.random.default_rng(1)
    for _ in range(20):
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        ident = b("quat_mul")(q, b("quat_inv")(q))
        assert np.allclose(ident, [1.0, 0.0, 0.0, 0.0], atol=1e-12)


def test_quat_angle_of_identity_and_half_turn():
    assert b("quat_angle")(np.array([1.0, 0, 0, 0])) == 0.0
    half = np.array([np.cos(np.pi / 4), np.sin(np.pi / 4), 0, 0])  # 90 deg about x
    assert abs(b("quat_angle")(half) - np.pi / 2) < 1e-12


def test_pose_z_axis_identity_upright():
    z = b("pose_z_axis")(np.array([1.0, 0.0, 0.0, 0.0]))
    assert np.allclose(z, [0.0, 0.0, 1.0])
    # arccos of its z component is zero tilt
    assert b("arccos")(float(z[2])) == 0.0


def test_pose_z_axis_quarter_turn_about_x():
    q = np.array([np.cos(np.pi / 4), np.sin(np.pi / 4), 0.0, 0.0])
    z = b("pose_z_axis")(q)
    assert np.allclose(z, [0.0, -1.0, 0.0], atol=1e-12)


def test_minmax_overloads():
    assert b("min")(np.array([3.0, -1.0, 2.0])) == -1.0
    assert b("max")(np.array([3.0, -1.0, 2.0])) == 3.0
    assert b("min")(2.0, 1.0) == 1.0
    assert b("max")(0.0, -0.5) == 0.0


def test_domain_violations():
    with pytest.raises(DomainViolation):
        b("log")(0.0)
    with pytest.raises(DomainViolation):
        b("sqrt")(-1e-9)
    with pytest.raises(DomainViolation):
        b("arccos")(1.0 + 1e-6)
    with pytest.raises(DomainViolation):
        b("quat_inv")(np.zeros(4))
    with pytest.raises(DomainViolation):
        b("exp")(1e4)


def test_vec3_constructor():
    v = b("vec3")(1.0, 2.0, 3.0)
    assert v.dtype == np.float64 and v.shape == (3,)
    assert list(v) == [1.0, 2.0, 3.0]
