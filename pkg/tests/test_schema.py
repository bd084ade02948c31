import pytest

from t2r import envlab
from t2r import schema as sch


def _mini_schema(attrs=None, methods=None):
    return sch.EnvironmentSchema(
        env_id="mini",
        entities=(
            sch.EntitySpec(
                name="Env", doc="root",
                attributes=tuple(attrs or (
                    sch.AttributeSpec("x", sch.SCALAR, doc="a scalar"),
                )),
                methods=tuple(methods or ()),
            ),
        ),
        knowledge_notes=("note one",),
        action_dim=2,
    )


def test_well_formed_shipped_schema_has_empty_report(lift_schema):
    report = sch.validate_schema(lift_schema)
    assert report.ok
    assert list(report) == []


def test_duplicate_attribute_is_reported():
    schema = _mini_schema(attrs=(
        sch.AttributeSpec("pose", sch.VEC3, doc="first"),
        sch.AttributeSpec("pose", sch.VEC3, doc="second"),
    ))
    report = sch.validate_schema(schema)
    assert not report.ok
    assert any(i.path == "Env.pose" and "duplicate" in i.message for i in report)


def test_quat_with_wrong_length_is_a_dtype_issue():
    schema = _mini_schema(attrs=(
        sch.AttributeSpec("q", sch.parse_dtype("quat:3"), doc="bad quat"),
    ))
    report = sch.validate_schema(schema)
    assert any("quat must have length 4" in i.message for i in report)


def test_missing_doc_and_bad_action_dim_reported():
    schema = sch.EnvironmentSchema(
        env_id="bad",
        entities=(sch.EntitySpec("Env", "r", (sch.AttributeSpec("x", sch.SCALAR, doc=""),)),),
        knowledge_notes=(),
        action_dim=0,
    )
    report = sch.validate_schema(schema)
    messages = [i.message for i in report]
    assert any("doc" in m for m in messages)
    assert any("action_dim" in m for m in messages)


def test_render_contains_const_line(lift_schema):
    text = sch.render_abstraction(lift_schema)
    assert "self.cube_half_size = 0.02 # in meters" in text
    assert "def check_grasp(self, obj : RigidObject) -> bool" in text
    assert "Additional knowledge:" in text


def test_render_is_deterministic(lift_schema):
    assert sch.render_abstraction(lift_schema) == sch.render_abstraction(lift_schema)


def test_render_empty_entity_schema():
    schema = sch.EnvironmentSchema(
        env_id="empty",
        entities=(sch.EntitySpec("Env", "root", ()),),
        knowledge_notes=("only note",),
        action_dim=1,
    )
    text = sch.render_abstraction(schema)
    assert text.startswith("class Env:")
    assert text.rstrip().endswith("1. only note")


def test_render_rejects_invalid_schema():
    schema = _mini_schema(attrs=(
        sch.AttributeSpec("pose", sch.VEC3, doc="first"),
        sch.AttributeSpec("pose", sch.VEC3, doc="second"),
    ))
    with pytest.raises(sch.InvalidSchema):
        sch.render_abstraction(schema)


def test_resolve_vec3_and_method(lift_schema):
    spec = sch.resolve_path(lift_schema, "cubeA.pose.p")
    assert isinstance(spec, sch.AttributeSpec)
    assert spec.dtype == sch.VEC3

    meth = sch.resolve_path(lift_schema, "robot.check_grasp")
    assert isinstance(meth, sch.MethodSpec)
    assert meth.returns == sch.BOOLEAN


def test_resolve_strips_self(lift_schema):
    assert sch.resolve_path(lift_schema, "self.cubeA.pose.p") == sch.resolve_path(
        lift_schema, "cubeA.pose.p"
    )


def test_unknown_path_carries_prefix(lift_schema):
    with pytest.raises(sch.UnknownPath) as exc:
        sch.resolve_path(lift_schema, "robot.elbow")
    assert exc.value.prefix == "robot"
    assert exc.value.failed == "elbow"

    with pytest.raises(sch.UnknownPath) as exc:
        sch.resolve_path(lift_schema, "faucet.handle.qpos")
    assert exc.value.prefix == ""
    assert exc.value.failed == "faucet"


@pytest.mark.parametrize("env_id", envlab.ENV_IDS)
def test_every_rendered_leaf_path_resolves(env_id):
    # resolve_path succeeds exactly for what the rendered abstraction exposes
    schema = envlab.env_schema(env_id)
    text = sch.render_abstraction(schema)
    for path, attr in sch.iter_leaf_paths(schema):
        assert sch.resolve_path(schema, path) is attr
        assert f"self.{path.rsplit('.', 1)[-1]}" in text


def test_attribute_owner_names(lift_schema):
    assert sch.attribute_owner_names(lift_schema, "qvel") == ["GripperRobot"]
    assert sch.attribute_owner_names(lift_schema, "nonexistent") == []
