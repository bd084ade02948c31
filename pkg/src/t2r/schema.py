"""Environment abstraction: typed entities/attributes/methods and their prompt rendering.

A schema is the single source of truth for two consumers: the class-style
prompt text shown to the LLM, and the reward-DSL typechecker. Schemas are
authored as JSON files, loaded once, validated, and treated as immutable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

__all__ = [
    "Dtype",
    "SCALAR",
    "BOOLEAN",
    "VEC3",
    "QUAT",
    "POINTCLOUD",
    "vecn",
    "entity_ref",
    "ANY_ENTITY",
    "AttributeSpec",
    "MethodSpec",
    "ParamSpec",
    "EntitySpec",
    "EnvironmentSchema",
    "ValidationIssue",
    "ValidationReport",
    "InvalidSchema",
    "UnknownPath",
    "load_schema",
    "schema_from_dict",
    "validate_schema",
    "render_abstraction",
    "render_knowledge",
    "resolve_path",
    "split_path",
]


@dataclass(frozen=True)
class Dtype:
    """One of the closed set of value types: scalar, boolean, vec3, quat,
    vecN(n), pointcloud, or an entity reference."""

    kind: str
    n: int | None = None        # vecn length (also used to flag malformed quat lengths)
    entity: str | None = None   # target entity name for refs; None means "any entity"

    def __str__(self) -> str:
        if self.kind == "vecn":
            return f"vecN({self.n})"
        if self.kind == "entity":
            return f"entity({self.entity})" if self.entity else "entity"
        return self.kind

    @property
    def is_vector(self) -> bool:
        return self.kind in ("vec3", "quat", "vecn")

    def vector_length(self) -> int | None:
        if self.kind == "vec3":
            return 3
        if self.kind == "quat":
            return 4
        if self.kind == "vecn":
            return self.n
        return None


SCALAR = Dtype("scalar")
BOOLEAN = Dtype("boolean")
VEC3 = Dtype("vec3")
QUAT = Dtype("quat")
POINTCLOUD = Dtype("pointcloud")
ANY_ENTITY = Dtype("entity")


def vecn(n: int) -> Dtype:
    return Dtype("vecn", n=n)


def entity_ref(name: str) -> Dtype:
    return Dtype("entity", entity=name)


_SIMPLE_DTYPES = {
    "scalar": SCALAR,
    "boolean": BOOLEAN,
    "bool": BOOLEAN,
    "vec3": VEC3,
    "quat": QUAT,
    "pointcloud": POINTCLOUD,
    "entity": ANY_ENTITY,
}


def parse_dtype(text: str) -> Dtype:
    """Parse a dtype string as used in schema JSON, e.g. "vec3", "vecN:7",
    "entity:RigidObject". Malformed lengths are preserved so validation can
    report them ("quat:3" parses to a quat with n=3)."""
    text = text.strip()
    if ":" in text:
        head, _, tail = text.partition(":")
        head = head.strip().lower()
        tail = tail.strip()
        if head in ("vecn", "vec"):
            return Dtype("vecn", n=int(tail))
        if head == "quat":
            return Dtype("quat", n=int(tail))
        if head == "entity":
            return entity_ref(tail)
        raise ValueError(f"unknown dtype {text!r}")
    key = text.lower()
    if key in _SIMPLE_DTYPES:
        return _SIMPLE_DTYPES[key]
    if key == "vecn":
        raise ValueError("vecN requires an explicit length, e.g. vecN:7")
    raise ValueError(f"unknown dtype {text!r}")


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    dtype: Dtype
    doc: str
    units: str = ""
    const: float | None = None  # fixed value, rendered inline (e.g. cube_half_size = 0.02)


@dataclass(frozen=True)
class ParamSpec:
    name: str
    dtype: Dtype


@dataclass(frozen=True)
class MethodSpec:
    name: str
    params: tuple[ParamSpec, ...]
    returns: Dtype
    doc: str


@dataclass(frozen=True)
class EntitySpec:
    name: str
    doc: str
    attributes: tuple[AttributeSpec, ...] = ()
    methods: tuple[MethodSpec, ...] = ()

    def attribute(self, name: str) -> AttributeSpec | None:
        for a in self.attributes:
            if a.name == name:
                return a
        return None

    def method(self, name: str) -> MethodSpec | None:
        for m in self.methods:
            if m.name == name:
                return m
        return None


@dataclass(frozen=True)
class EnvironmentSchema:
    """Typed description of one environment. The first entity is the root
    scope: top-level path segments resolve against its attributes."""

    env_id: str
    entities: tuple[EntitySpec, ...]
    knowledge_notes: tuple[str, ...]
    action_dim: int
    action_low: float = -1.0
    action_high: float = 1.0

    @property
    def root(self) -> EntitySpec:
        return self.entities[0]

    def entity(self, name: str) -> EntitySpec | None:
        for e in self.entities:
            if e.name == name:
                return e
        return None


@dataclass(frozen=True)
class ValidationIssue:
    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...]

    @property
    def ok(self) -> bool:
        return not self.issues

    def __iter__(self):
        return iter(self.issues)


class InvalidSchema(Exception):
    def __init__(self, report: ValidationReport):
        self.report = report
        lines = "; ".join(f"{i.path}: {i.message}" for i in report.issues)
        super().__init__(f"invalid schema: {lines}")


class UnknownPath(Exception):
    """Raised when a dotted path does not resolve. `prefix` is the longest
    resolvable prefix and `failed` the first segment that did not resolve;
    the message is what the refinement loop feeds back to the LLM."""

    def __init__(self, path: str, prefix: str, failed: str, hint: str = ""):
        self.path = path
        self.prefix = prefix
        self.failed = failed
        msg = f"unknown path '{path}': '{failed}' not found"
        msg += f" under '{prefix}'" if prefix else " at top level"
        if hint:
            msg += f"; {hint}"
        super().__init__(msg)


def schema_from_dict(data: dict) -> EnvironmentSchema:
    entities = []
    for ed in data.get("entities", []):
        attributes = tuple(
            AttributeSpec(
                name=ad["name"],
                dtype=parse_dtype(ad["dtype"]),
                doc=ad.get("doc", ""),
                units=ad.get("units", ""),
                const=ad.get("const"),
            )
            for ad in ed.get("attributes", [])
        )
        methods = tuple(
            MethodSpec(
                name=md["name"],
                params=tuple(ParamSpec(p["name"], parse_dtype(p["dtype"])) for p in md.get("params", [])),
                returns=parse_dtype(md["returns"]),
                doc=md.get("doc", ""),
            )
            for md in ed.get("methods", [])
        )
        entities.append(EntitySpec(name=ed["name"], doc=ed.get("doc", ""), attributes=attributes, methods=methods))
    action = data.get("action", {})
    return EnvironmentSchema(
        env_id=data["env_id"],
        entities=tuple(entities),
        knowledge_notes=tuple(data.get("knowledge_notes", [])),
        action_dim=int(action.get("dim", 0)),
        action_low=float(action.get("low", -1.0)),
        action_high=float(action.get("high", 1.0)),
    )


def load_schema(source: Union[str, Path, dict]) -> EnvironmentSchema:
    """Load a schema from a JSON file (or an already-parsed dict) and
    validate it; raises InvalidSchema on any violation."""
    if isinstance(source, dict):
        data = source
    else:
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    schema = schema_from_dict(data)
    report = validate_schema(schema)
    if not report.ok:
        raise InvalidSchema(report)
    return schema


def validate_schema(schema: EnvironmentSchema) -> ValidationReport:
    """Check every schema invariant; the report lists one issue per violation
    (an empty report means the schema is well-formed)."""
    issues: list[ValidationIssue] = []

    def bad(path: str, message: str) -> None:
        issues.append(ValidationIssue(path, message))

    if not schema.entities:
        bad(schema.env_id, "schema has no entities")
        return ValidationReport(tuple(issues))

    seen_entities: set[str] = set()
    for ent in schema.entities:
        if ent.name in seen_entities:
            bad(ent.name, "duplicate entity name")
        seen_entities.add(ent.name)

    for ent in schema.entities:
        seen: set[str] = set()
        for attr in ent.attributes:
            apath = f"{ent.name}.{attr.name}"
            if attr.name in seen:
                bad(apath, "duplicate attribute name within entity")
            seen.add(attr.name)
            if not attr.doc:
                bad(apath, "attributes require a doc comment")
            dt = attr.dtype
            if dt.kind == "vecn" and (dt.n is None or dt.n < 1):
                bad(apath, "vecN requires explicit length n >= 1")
            if dt.kind == "quat" and dt.n not in (None, 4):
                bad(apath, f"quat must have length 4, declared {dt.n}")
            if dt.kind == "entity":
                if not dt.entity:
                    bad(apath, "attribute entity refs must name a target entity")
                elif schema.entity(dt.entity) is None:
                    bad(apath, f"entity ref target '{dt.entity}' not defined")
            if attr.const is not None and dt.kind != "scalar":
                bad(apath, "const values are only supported on scalar attributes")
        for meth in ent.methods:
            mpath = f"{ent.name}.{meth.name}"
            if meth.name in seen:
                bad(mpath, "method name collides with attribute or method")
            seen.add(meth.name)
            rt = meth.returns
            if rt.kind == "entity":
                bad(mpath, "methods may not return entity references")
            for p in meth.params:
                if p.dtype.kind == "entity" and p.dtype.entity and schema.entity(p.dtype.entity) is None:
                    bad(mpath, f"param '{p.name}' entity ref target '{p.dtype.entity}' not defined")

    if schema.action_dim < 1:
        bad("action", "action_dim must be >= 1")
    if not schema.action_low < schema.action_high:
        bad("action", f"action bounds must satisfy low < high, got [{schema.action_low}, {schema.action_high}]")

    return ValidationReport(tuple(issues))


_TYPE_TEXT = {
    "scalar": "float",
    "boolean": "bool",
    "pointcloud": "np.ndarray[(M,3)]",
}


def _dtype_text(dt: Dtype) -> str:
    if dt.kind == "entity":
        return dt.entity or "object"
    if dt.is_vector:
        return f"np.ndarray[({dt.vector_length()},)]"
    return _TYPE_TEXT[dt.kind]


def _format_const(value: float) -> str:
    # 0.02 renders as "0.02", 1.0 as "1.0"; repr of floats is stable in py3
    return repr(float(value))


def render_knowledge(notes: Iterable[str]) -> str:
    """Numbered Additional-knowledge list body ('' for no notes)."""
    return "\n".join(f"{i}. {note}" for i, note in enumerate(notes, start=1))


def render_entities(schema: EnvironmentSchema) -> str:
    """Class-style blocks only, one per entity, in declaration order."""
    blocks: list[str] = []
    for ent in schema.entities:
        lines = [f"class {ent.name}:" + (f" # {ent.doc}" if ent.doc else "")]
        for attr in ent.attributes:
            if attr.const is not None:
                lines.append(f"    self.{attr.name} = {_format_const(attr.const)} # {attr.doc}")
            else:
                lines.append(f"    self.{attr.name} : {_dtype_text(attr.dtype)} # {attr.doc}")
        for meth in ent.methods:
            params = "".join(f", {p.name} : {_dtype_text(p.dtype)}" for p in meth.params)
            lines.append(
                f"    def {meth.name}(self{params}) -> {_dtype_text(meth.returns)} # {meth.doc}"
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks)


def render_abstraction(schema: EnvironmentSchema, include_knowledge: bool = True) -> str:
    """Deterministic prompt text for the environment: one class block per
    entity followed by the Additional-knowledge numbered list. Byte-identical
    across calls for the same schema."""
    report = validate_schema(schema)
    if not report.ok:
        raise InvalidSchema(report)
    text = render_entities(schema)
    if include_knowledge:
        text += "\n\nAdditional knowledge:\n" + render_knowledge(schema.knowledge_notes)
    return text


def split_path(path: Union[str, tuple, list]) -> tuple[str, ...]:
    parts = tuple(path.split(".")) if isinstance(path, str) else tuple(path)
    if parts and parts[0] == "self":
        parts = parts[1:]
    return parts


def resolve_path(
    schema: EnvironmentSchema, path: Union[str, tuple, list]
) -> AttributeSpec | MethodSpec:
    """Resolve a dotted path like 'cubeA.pose.p' or 'robot.check_grasp' to
    its attribute or method spec, traversing nested entity refs. A leading
    'self.' segment is ignored. Raises UnknownPath carrying the longest
    resolvable prefix."""
    parts = split_path(path)
    dotted = ".".join(parts)
    if not parts:
        raise UnknownPath(dotted, "", "", hint="empty path")
    ent = schema.root
    prefix: list[str] = []
    for i, seg in enumerate(parts):
        attr = ent.attribute(seg)
        meth = ent.method(seg)
        last = i == len(parts) - 1
        if meth is not None:
            if not last:
                raise UnknownPath(dotted, ".".join(prefix + [seg]), parts[i + 1],
                                  hint=f"'{seg}' is a method and has no attributes")
            return meth
        if attr is None:
            hint = _misuse_hint(schema, ent, seg)
            raise UnknownPath(dotted, ".".join(prefix), seg, hint=hint)
        if last:
            return attr
        if attr.dtype.kind != "entity":
            raise UnknownPath(dotted, ".".join(prefix + [seg]), parts[i + 1],
                              hint=f"'{seg}' is a {attr.dtype} and has no attribute '{parts[i + 1]}'")
        ent = schema.entity(attr.dtype.entity)  # validated to exist
        prefix.append(seg)
    raise AssertionError("unreachable")


def _misuse_hint(schema: EnvironmentSchema, at: EntitySpec, name: str) -> str:
    owners = [
        e.name
        for e in schema.entities
        if e is not at and (e.attribute(name) is not None or e.method(name) is not None)
    ]
    if owners:
        return f"'{name}' exists on {', '.join(sorted(owners))}, not on {at.name}"
    avail = ", ".join([a.name for a in at.attributes] + [m.name for m in at.methods])
    return f"available on {at.name}: {avail}"


def attribute_owner_names(schema: EnvironmentSchema, name: str) -> list[str]:
    """Entities on which `name` exists as an attribute or method (used by the
    error classifier to split misuse from hallucination)."""
    return sorted(
        e.name for e in schema.entities if e.attribute(name) is not None or e.method(name) is not None
    )


def iter_leaf_paths(schema: EnvironmentSchema):
    """Yield (dotted_path, AttributeSpec) for every non-entity attribute
    reachable from the root, depth-first in declaration order."""

    def walk(ent: EntitySpec, prefix: tuple[str, ...], seen: tuple[str, ...]):
        for attr in ent.attributes:
            path = prefix + (attr.name,)
            if attr.dtype.kind == "entity":
                target = schema.entity(attr.dtype.entity)
                if target is not None and target.name not in seen:
                    yield from walk(target, path, seen + (target.name,))
            else:
                yield ".".join(path), attr

    yield from walk(schema.root, (), (schema.root.name,))
