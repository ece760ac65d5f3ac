"""Object-oriented world state, poses, and skill schemas."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import ActionError

CATEGORIES = (
    "block", "bowl", "obstacle", "banana", "strawberry",
    "meat_can", "power_drill", "apple", "pear",
)
YCB_CATEGORIES = ("banana", "strawberry", "meat_can", "power_drill", "apple", "pear")


# --------------------------------------------------------------------------
# poses
# --------------------------------------------------------------------------

def _rx(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _ry(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _rz(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def euler_to_matrix(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """Intrinsic X-Y-Z Euler angles: R = Rx(roll) @ Ry(pitch) @ Rz(yaw)."""
    return _rx(roll) @ _ry(pitch) @ _rz(yaw)


def matrix_to_euler(R: np.ndarray) -> tuple[float, float, float]:
    s = float(np.clip(R[0, 2], -1.0, 1.0))
    pitch = math.asin(s)
    if abs(s) < 1.0 - 1e-12:
        roll = math.atan2(-R[1, 2], R[2, 2])
        yaw = math.atan2(-R[0, 1], R[0, 0])
    else:
        # gimbal lock: only roll +/- yaw is observable, put it all in yaw
        roll = 0.0
        yaw = math.atan2(R[1, 0], R[1, 1])
    return roll, pitch, yaw


@dataclass(frozen=True)
class Pose:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0

    def __post_init__(self):
        for name in ("x", "y", "z", "roll", "pitch", "yaw"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ValueError(f"Pose.{name} must be a finite number, got {v!r}")
            object.__setattr__(self, name, float(v))

    @property
    def point(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    @property
    def euler(self) -> tuple[float, float, float]:
        return (self.roll, self.pitch, self.yaw)

    @property
    def has_rotation(self) -> bool:
        return bool(self.roll or self.pitch or self.yaw)

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.z, self.roll, self.pitch, self.yaw]

    @classmethod
    def from_seq(cls, values: Sequence[float]) -> "Pose":
        if len(values) == 3:
            return cls(*values)
        if len(values) == 6:
            return cls(*values)
        raise ValueError(f"pose needs 3 or 6 numbers, got {len(values)}")

    def rotation(self) -> np.ndarray:
        return euler_to_matrix(self.roll, self.pitch, self.yaw)

    def matrix(self) -> np.ndarray:
        T = np.eye(4)
        T[:3, :3] = self.rotation()
        T[:3, 3] = self.point
        return T

    @classmethod
    def from_matrix(cls, T: np.ndarray) -> "Pose":
        roll, pitch, yaw = matrix_to_euler(T[:3, :3])
        return cls(float(T[0, 3]), float(T[1, 3]), float(T[2, 3]), roll, pitch, yaw)

    def multiply(self, other: "Pose") -> "Pose":
        return pose_compose(self, other)

    def inverse(self) -> "Pose":
        if not self.has_rotation:
            return Pose(-self.x, -self.y, -self.z)
        R = self.rotation()
        T = np.eye(4)
        T[:3, :3] = R.T
        T[:3, 3] = -R.T @ np.array(self.point)
        return Pose.from_matrix(T)

    def translated(self, dx=0.0, dy=0.0, dz=0.0) -> "Pose":
        return replace(self, x=self.x + dx, y=self.y + dy, z=self.z + dz)

    def isclose(self, other: "Pose", tol: float = 1e-9) -> bool:
        """Compare as rigid transforms, not as Euler triples."""
        return bool(np.allclose(self.matrix(), other.matrix(), atol=tol, rtol=0.0))


IDENTITY = Pose()


def pose_compose(a: Pose, b: Pose) -> Pose:
    """Rigid-body composition a * b.

    Euler angles are carried over verbatim when one side has no rotation, so
    representations such as pitch=pi survive a pure-translation offset.
    """
    if not a.has_rotation:
        return Pose(a.x + b.x, a.y + b.y, a.z + b.z, b.roll, b.pitch, b.yaw)
    Ra = a.rotation()
    t = Ra @ np.array(b.point) + np.array(a.point)
    if not b.has_rotation:
        return Pose(float(t[0]), float(t[1]), float(t[2]), a.roll, a.pitch, a.yaw)
    roll, pitch, yaw = matrix_to_euler(Ra @ b.rotation())
    return Pose(float(t[0]), float(t[1]), float(t[2]), roll, pitch, yaw)


# --------------------------------------------------------------------------
# shapes and objects
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Shape:
    """Primitive collision proxy.

    ``box``: axis-aligned, ``half_extents`` (hx, hy, hz).
    ``cylinder``: vertical, ``radius`` and ``height``.
    ``circle``: flat disk on the table (drawing obstacles), ``radius`` only.
    """

    kind: str
    half_extents: tuple[float, float, float] | None = None
    radius: float | None = None
    height: float | None = None

    def __post_init__(self):
        if self.kind == "box":
            if self.half_extents is None or len(self.half_extents) != 3 or min(self.half_extents) <= 0:
                raise ValueError("box needs three positive half extents")
            object.__setattr__(self, "half_extents", tuple(float(h) for h in self.half_extents))
        elif self.kind == "cylinder":
            if not self.radius or self.radius <= 0 or not self.height or self.height <= 0:
                raise ValueError("cylinder needs positive radius and height")
        elif self.kind == "circle":
            if not self.radius or self.radius <= 0:
                raise ValueError("circle needs a positive radius")
        else:
            raise ValueError(f"unknown shape kind {self.kind!r}")

    @property
    def half_height(self) -> float:
        if self.kind == "box":
            return self.half_extents[2]
        if self.kind == "cylinder":
            return self.height / 2
        return 0.0

    @property
    def width(self) -> float:
        """Horizontal extent across the narrowest side."""
        if self.kind == "box":
            return 2 * min(self.half_extents[0], self.half_extents[1])
        return 2 * self.radius

    def to_dict(self) -> dict:
        if self.kind == "box":
            return {"kind": "box", "half_extents": list(self.half_extents)}
        if self.kind == "cylinder":
            return {"kind": "cylinder", "radius": self.radius, "height": self.height}
        return {"kind": "circle", "radius": self.radius}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Shape":
        he = d.get("half_extents")
        return cls(d["kind"], tuple(he) if he is not None else None, d.get("radius"), d.get("height"))


_SHAPE_KIND = {"block": "box", "obstacle": "circle"}


@lru_cache(maxsize=None)
def _shape_table() -> dict:
    text = resources.files("ccsplan").joinpath("data/shapes.json").read_text()
    return {k: v for k, v in json.loads(text).items() if not k.startswith("_")}


def shape_for(category: str, radius: float | None = None) -> Shape:
    """Default proxy shape for a category; obstacles need an explicit radius."""
    table = _shape_table()
    if category not in table:
        raise ValueError(f"unknown category {category!r}")
    entry = dict(table[category])
    if entry["kind"] == "circle":
        entry["radius"] = radius
    elif radius is not None:
        entry["radius"] = radius
    return Shape.from_dict(entry)


@dataclass(frozen=True)
class SceneObject:
    name: str
    category: str
    color: str
    pose: Pose
    shape: Shape

    def __post_init__(self):
        if not self.name or not isinstance(self.name, str):
            raise ValueError("object name must be a non-empty string")
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")
        expected = _SHAPE_KIND.get(self.category, "cylinder")
        if self.shape.kind != expected:
            raise ValueError(f"{self.category} must use a {expected} shape, got {self.shape.kind}")

    @property
    def point(self):
        return self.pose.point

    @property
    def bottom(self) -> float:
        return self.pose.z - self.shape.half_height

    @property
    def top(self) -> float:
        return self.pose.z + self.shape.half_height

    def moved_to(self, pose: Pose) -> "SceneObject":
        return replace(self, pose=pose)

    def to_dict(self) -> dict:
        return {
            "category": self.category,
            "color": self.color,
            "pose": self.pose.as_list(),
            "shape": self.shape.to_dict(),
        }


def make_object(name: str, category: str, color: str, pose: Pose | Sequence[float],
                radius: float | None = None) -> SceneObject:
    if not isinstance(pose, Pose):
        pose = Pose.from_seq(pose)
    return SceneObject(name, category, color, pose, shape_for(category, radius))


@dataclass(frozen=True)
class Held:
    object: str
    grasp: Pose


Segment2 = tuple[tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class WorldState:
    objects: Mapping[str, SceneObject] = field(default_factory=dict)
    drawn_lines: tuple[Segment2, ...] = ()
    held: Held | None = None

    def __post_init__(self):
        objs = self.objects
        if not isinstance(objs, dict):
            objs = {o.name: o for o in objs}
        for key, obj in objs.items():
            if key != obj.name:
                raise ValueError(f"object key {key!r} does not match name {obj.name!r}")
        object.__setattr__(self, "objects", dict(sorted(objs.items())))
        object.__setattr__(self, "drawn_lines", tuple(
            ((float(a[0]), float(a[1])), (float(b[0]), float(b[1]))) for a, b in self.drawn_lines))
        if self.held is not None and self.held.object not in self.objects:
            raise ValueError(f"held object {self.held.object!r} is not in the scene")

    def __getitem__(self, name: str) -> SceneObject:
        return self.objects[name]

    def __contains__(self, name) -> bool:
        return name in self.objects

    def __hash__(self):
        return hash((tuple(self.objects.items()), self.drawn_lines, self.held))

    def with_object(self, obj: SceneObject) -> "WorldState":
        objs = dict(self.objects)
        objs[obj.name] = obj
        return WorldState(objs, self.drawn_lines, self.held)

    def with_poses(self, poses: Mapping[str, Pose]) -> "WorldState":
        if not poses:
            return self
        objs = dict(self.objects)
        for name, pose in poses.items():
            objs[name] = objs[name].moved_to(pose)
        return WorldState(objs, self.drawn_lines, self.held)

    def with_line(self, seg: Segment2) -> "WorldState":
        return WorldState(self.objects, self.drawn_lines + (seg,), self.held)

    def with_held(self, held: Held | None) -> "WorldState":
        return WorldState(self.objects, self.drawn_lines, held)

    def by_category(self, *categories: str) -> list[SceneObject]:
        return [o for o in self.objects.values() if o.category in categories]


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def state_to_dict(s: WorldState) -> dict:
    return {
        "objects": {name: obj.to_dict() for name, obj in s.objects.items()},
        "drawn_lines": [[list(a), list(b)] for a, b in s.drawn_lines],
        "held": None if s.held is None else {"object": s.held.object, "grasp": s.held.grasp.as_list()},
    }


def state_from_dict(d: Mapping[str, Any]) -> WorldState:
    objs = {}
    for name, od in d.get("objects", {}).items():
        objs[name] = SceneObject(name, od["category"], od["color"], Pose.from_seq(od["pose"]),
                                 Shape.from_dict(od["shape"]))
    held = d.get("held")
    return WorldState(
        objs,
        tuple((tuple(a), tuple(b)) for a, b in d.get("drawn_lines", [])),
        None if held is None else Held(held["object"], Pose.from_seq(held["grasp"])),
    )


def state_to_json(s: WorldState, indent: int | None = None) -> str:
    return json.dumps(state_to_dict(s), indent=indent)


def state_from_json(text: str) -> WorldState:
    return state_from_dict(json.loads(text))


def _r2(v: float) -> str:
    return repr(round(v, 2))


def state_to_prompt_text(s: WorldState) -> str:
    """Render the state the way objects are listed for the LLM, one per line."""
    lines = []
    for name, obj in s.objects.items():
        pose = ", ".join(_r2(v) for v in obj.pose.as_list())
        extra = f", radius={_r2(obj.shape.radius)}" if obj.shape.kind == "circle" else ""
        lines.append(f'"{name}": Object(cat="{obj.category}", color="{obj.color}", pose=[{pose}]{extra})')
    body = ",\n ".join(lines)
    text = "{" + body + "}"
    if s.drawn_lines:
        segs = ", ".join(f"[{_r2(a[0])}, {_r2(a[1])}, {_r2(b[0])}, {_r2(b[1])}]" for a, b in s.drawn_lines)
        text += f"\ndrawn_lines=[{segs}]"
    return text


# --------------------------------------------------------------------------
# skills
# --------------------------------------------------------------------------

PARAM_KINDS = ("scalar", "object-ref", "grasp", "pose")


@dataclass(frozen=True)
class SkillSchema:
    name: str
    description: str
    param_spec: tuple[tuple[str, str], ...]

    def __post_init__(self):
        names = [p for p, _ in self.param_spec]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate parameter names in skill {self.name!r}")
        for _, kind in self.param_spec:
            if kind not in PARAM_KINDS:
                raise ValueError(f"unknown parameter kind {kind!r}")


@dataclass(frozen=True)
class GroundAction:
    name: str
    params: tuple

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))

    def to_json(self) -> dict:
        return {"name": self.name, "params": [_param_to_json(p) for p in self.params]}

    @classmethod
    def from_json(cls, d: Mapping[str, Any], schemas: Sequence[SkillSchema] | None = None) -> "GroundAction":
        params = []
        kinds = None
        if schemas is not None:
            for sch in schemas:
                if sch.name == d["name"] and len(sch.param_spec) == len(d["params"]):
                    kinds = [k for _, k in sch.param_spec]
        for i, p in enumerate(d["params"]):
            if isinstance(p, dict) and "pose" in p:
                params.append(Pose.from_seq(p["pose"]))
            elif kinds is not None and kinds[i] in ("grasp", "pose") and isinstance(p, list):
                params.append(Pose.from_seq(p))
            else:
                params.append(p)
        return cls(d["name"], tuple(params))

    def __str__(self):
        return f"{self.name}({', '.join(_fmt_param(p) for p in self.params)})"


def _param_to_json(p):
    if isinstance(p, Pose):
        return {"pose": p.as_list()}
    return p


def _fmt_param(p):
    if isinstance(p, Pose):
        return "Pose(" + ", ".join(f"{v:.4g}" for v in p.as_list()) + ")"
    if isinstance(p, float):
        return f"{p:.4g}"
    return repr(p)


DRAWING_SKILLS = (
    SkillSchema(
        "draw_line",
        "Draws a straight line from (p1_x, p1_y) to (p2_x, p2_y). "
        "The pen is lifted up to get to the start of the next action.",
        (("p1_x", "scalar"), ("p1_y", "scalar"), ("p2_x", "scalar"), ("p2_y", "scalar")),
    ),
)

ARRANGE_SKILLS = (
    SkillSchema("pick", "Move to the gripper to location x, y, z and close the gripper",
                (("x", "scalar"), ("y", "scalar"), ("z", "scalar"))),
    SkillSchema("place", "Move to the gripper to location x, y, z and open the gripper",
                (("x", "scalar"), ("y", "scalar"), ("z", "scalar"))),
)

YCB_SKILLS = (
    SkillSchema("pick", "Pick up object o at grasp g sampled from a grasp sampler. "
                "Grasps MUST come from grasp samplers.",
                (("o", "object-ref"), ("g", "grasp"))),
    SkillSchema("place", "If holding an object o at grasp g, place the object at pose p.",
                (("o", "object-ref"), ("g", "grasp"), ("p", "pose"))),
)


def _kind_of(value) -> str | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return "scalar" if math.isfinite(value) else None
    if isinstance(value, str):
        return "object-ref"
    if isinstance(value, Pose):
        return "pose"
    return None


def validate_action(a: GroundAction, schemas: Iterable[SkillSchema]) -> None:
    """Raise :class:`ActionError` unless ``a`` matches the schema of the same name."""
    schemas = list(schemas)
    if not schemas:
        raise ValueError("no skill schemas given")
    matching = [s for s in schemas if s.name == a.name]
    if not matching:
        raise ActionError(f"unknown skill {a.name!r}", "unknown-skill")
    schema = matching[0]
    if len(a.params) != len(schema.param_spec):
        raise ActionError(
            f"skill {a.name!r} takes {len(schema.param_spec)} parameters, got {len(a.params)}",
            "arity-mismatch")
    for value, (pname, kind) in zip(a.params, schema.param_spec):
        got = _kind_of(value)
        ok = got == kind or (kind == "grasp" and got == "pose")
        if not ok:
            raise ActionError(f"parameter {pname!r} of {a.name!r} must be {kind}, got {value!r}",
                              "kind-mismatch")
