"""Constraint classifiers over motion traces.

Each classifier maps one :class:`~ccsplan.sim.MotionTrace` to the violations
it finds.  Descriptions are plain sentences because they are fed back to the
LLM verbatim; they depend only on the constraint, the parties involved and the
plan step, never on sampled numbers, so identical failures aggregate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .config import DEFAULT, EnvConstants
from .geometry import (
    Footprint, disk_overlaps, footprint_of, footprint_within_disk, footprints_overlap,
    point_segment_distance,
)
from .scene import Pose
from .sim import MotionTrace, reachable

CONSTRAINT_ORDER = ("kinematic", "collision", "grasp", "placement", "program-error")

UNREACHABLE = "Pose is not reachable by gripper"
EMPTY_GRASP = "No object between gripper fingers"


@dataclass(frozen=True)
class Violation:
    constraint: str
    description: str
    step_index: int
    action_name: str

    def __post_init__(self):
        if self.constraint not in CONSTRAINT_ORDER:
            raise ValueError(f"unknown constraint id {self.constraint!r}")
        if not self.description:
            raise ValueError("violation description must be non-empty")

    def sort_key(self):
        return (self.step_index, CONSTRAINT_ORDER.index(self.constraint))

    def to_json(self) -> dict:
        return {"constraint": self.constraint, "description": self.description,
                "step_index": self.step_index, "action_name": self.action_name}


def _v(trace: MotionTrace, constraint: str, description: str) -> Violation:
    return Violation(constraint, description, trace.index, trace.action.name)


def _unique(vs: Iterable[Violation]) -> list[Violation]:
    seen = set()
    out = []
    for v in vs:
        if v.description not in seen:
            seen.add(v.description)
            out.append(v)
    return out


def check_kinematic(trace: MotionTrace, consts: EnvConstants = DEFAULT) -> list[Violation]:
    for step in trace.steps:
        if not (reachable(step.start, consts) and reachable(step.end, consts)):
            return [_v(trace, "kinematic", UNREACHABLE)]
    return []


def _z_overlap(lo: float, hi: float, obj, eps: float = 1e-9) -> bool:
    return lo < obj.top - eps and hi > obj.bottom + eps


def _inside_bowl(fp: Footprint, bowl) -> bool:
    b = footprint_of(bowl)
    return footprint_within_disk(fp, b.cx, b.cy, b.r)


def check_collision(trace: MotionTrace, consts: EnvConstants = DEFAULT) -> list[Violation]:
    """Unexpected contact of the gripper, the pen tip, or the carried object.

    Expected contacts (the object being picked or placed) are ignored, as are
    pen-up transits and things lowered entirely inside a bowl.  Each colliding
    object is reported once per action.
    """
    found: dict[str, str] = {}
    if trace.tool == "pen":
        for k, step in enumerate(trace.steps):
            if not step.pen_down:
                continue
            scene = trace.state_before(k)
            a, b = step.start[:2], step.end[:2]
            for o in scene.objects.values():
                if o.shape.kind != "circle":
                    continue
                if point_segment_distance((o.pose.x, o.pose.y), a, b) < o.shape.radius:
                    found.setdefault(o.name, f"Collision detected between object {o.name}, gripper")
        return [_v(trace, "collision", d) for d in found.values()]

    r = consts.gripper_radius
    for k, step in enumerate(trace.steps):
        if step.phase == "act":
            continue
        scene = trace.state_before(k)
        expected = {trace.target, step.carrying}
        if scene.held is not None:
            expected.add(scene.held.object)
        x, y = step.end[0], step.end[1]
        lo, hi = sorted((step.start[2], step.end[2]))
        gripper_fp = Footprint("disk", x, y, r=r)
        carried_fp = None
        if step.carrying is not None:
            c = scene[step.carrying]
            pose_a, pose_b = step.carry_start, step.carry_end
            carried_fp = footprint_of(c.moved_to(pose_b))
            hh = c.shape.half_height
            c_lo = min(pose_a.z, pose_b.z) - hh
            c_hi = max(pose_a.z, pose_b.z) + hh
        for o in scene.objects.values():
            if o.name in expected or o.name in found or o.category == "obstacle":
                continue
            fp = footprint_of(o)
            bowl = o.category == "bowl"
            if _z_overlap(lo, hi, o) and disk_overlaps(x, y, r, fp) and \
                    not (bowl and _inside_bowl(gripper_fp, o)):
                found[o.name] = f"Collision detected between object {o.name}, gripper"
                continue
            if carried_fp is not None and _z_overlap(c_lo, c_hi, o) and footprints_overlap(carried_fp, fp) and \
                    not (bowl and _inside_bowl(carried_fp, o)):
                found[o.name] = f"Collision detected between object {o.name}, object {step.carrying}"
    return [_v(trace, "collision", d) for d in found.values()]


_GRASP_TEXT = {
    "empty": lambda name: EMPTY_GRASP,
    "too-wide": lambda name: f"Object {name} is too wide for the gripper",
    "slip": lambda name: f"Object {name} falls out of the gripper",
}


def check_grasp(trace: MotionTrace, consts: EnvConstants = DEFAULT) -> list[Violation]:
    out = []
    if trace.error is not None:
        out.append(_v(trace, "grasp", trace.error))
    for step in trace.steps:
        g = step.grasp
        if g is None:
            continue
        for name in g.collisions:
            out.append(_v(trace, "grasp", f"Grasp pose collides with object {name}"))
        if not g.ok:
            out.append(_v(trace, "grasp", _GRASP_TEXT[g.reason](trace.target)))
    return _unique(out)


def check_placement(trace: MotionTrace, consts: EnvConstants = DEFAULT) -> list[Violation]:
    for step in trace.steps:
        if step.placed is not None and step.displacement is not None and \
                step.displacement > consts.placement_threshold:
            return [_v(trace, "placement", f"Object {step.placed} is unstable after placement")]
    return []


Classifier = Callable[[MotionTrace, EnvConstants], list]

CLASSIFIERS: dict[str, Classifier] = {
    "kinematic": check_kinematic,
    "collision": check_collision,
    "grasp": check_grasp,
    "placement": check_placement,
}


def make_registry(ids: Iterable[str]) -> dict[str, Classifier]:
    ids = list(ids)
    unknown = [i for i in ids if i not in CLASSIFIERS]
    if unknown:
        raise ValueError(f"unknown constraint(s): {unknown}")
    return {i: CLASSIFIERS[i] for i in CONSTRAINT_ORDER if i in ids}


def run_all(trace: MotionTrace, registry: Mapping[str, Classifier] | Sequence[str],
            consts: EnvConstants = DEFAULT) -> list[Violation]:
    """All violations of one trace, ordered by step then by constraint id."""
    if not isinstance(registry, Mapping):
        registry = make_registry(registry)
    if not registry:
        raise ValueError("constraint registry is empty")
    out = []
    for cid in CONSTRAINT_ORDER:
        fn = registry.get(cid)
        if fn is not None:
            out.extend(fn(trace, consts))
    return sorted(out, key=Violation.sort_key)


def program_error_violation(message: str, step_index: int = 0, action_name: str = "gen_plan") -> Violation:
    return Violation("program-error", f"Program error: {message}", step_index, action_name)
