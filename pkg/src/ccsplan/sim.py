"""Deterministic transition model.

Each skill runs as three phases (approach, act, retreat).  A phase records the
straight gripper path it swept, what was being carried, and the state after
the phase.  Feasibility is not judged here; the constraint classifiers read
the trace afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .config import DEFAULT, EnvConstants
from .errors import SimError
from .geometry import (
    Footprint, com_supported, disk_overlaps, footprint_of, footprint_within_disk,
    footprints_overlap, point_segment_distance,
)
from .scene import GroundAction, Held, Pose, SceneObject, WorldState, pose_compose

Point3 = tuple[float, float, float]

PHASES = ("approach", "act", "retreat")


@dataclass(frozen=True)
class GraspOutcome:
    object: str | None
    reason: str  # "ok" | "empty" | "too-wide" | "slip"
    collisions: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.reason == "ok"


@dataclass(frozen=True)
class TraceStep:
    phase: str
    start: Point3
    end: Point3
    state: WorldState
    carrying: str | None = None
    carry_start: Pose | None = None
    carry_end: Pose | None = None
    pen_down: bool = False
    grasp: GraspOutcome | None = None
    placed: str | None = None
    displacement: float | None = None


@dataclass(frozen=True)
class MotionTrace:
    action: GroundAction
    initial: WorldState
    steps: tuple[TraceStep, ...]
    tool: str = "gripper"
    target: str | None = None
    index: int = 0
    error: str | None = None

    @property
    def final(self) -> WorldState:
        return self.steps[-1].state if self.steps else self.initial

    def state_before(self, k: int) -> WorldState:
        return self.steps[k - 1].state if k > 0 else self.initial


# --------------------------------------------------------------------------
# reachability and settling
# --------------------------------------------------------------------------

def reachable(p: Sequence[float], consts: EnvConstants = DEFAULT) -> bool:
    """Analytic stand-in for inverse kinematics: inside the table box, below the z cap."""
    (x0, x1), (y0, y1), _ = consts.table_bounds
    x, y, z = p
    e = 1e-12
    return (x0 - e <= x <= x1 + e) and (y0 - e <= y <= y1 + e) and z <= consts.z_cap + e


def support_surface(obj: SceneObject, consts: EnvConstants) -> float:
    """Height at which things rest on ``obj``; bowls hold things on their floor."""
    if obj.category == "bowl":
        return obj.bottom + consts.bowl_floor_height
    return obj.top


def floor_under(fp: Footprint, state: WorldState, consts: EnvConstants, exclude=()) -> float:
    """Lowest allowed bottom height for a footprint: the table, or a bowl floor it sits inside."""
    floor = 0.0
    for other in state.objects.values():
        if other.category != "bowl" or other.name in exclude:
            continue
        b = footprint_of(other)
        if footprint_within_disk(fp, b.cx, b.cy, b.r):
            floor = max(floor, support_surface(other, consts))
    return floor


def _supporters(obj: SceneObject, objs: dict, skip: set, consts: EnvConstants) -> list[SceneObject]:
    fp = footprint_of(obj)
    out = []
    for other in objs.values():
        if other.name == obj.name or other.name in skip or other.category == "obstacle":
            continue
        if abs(support_surface(other, consts) - obj.bottom) <= consts.contact_eps and \
                footprints_overlap(fp, footprint_of(other)):
            out.append(other)
    return out


def is_stable(obj: SceneObject, supporters: Sequence[SceneObject], consts: EnvConstants) -> bool:
    fp = footprint_of(obj)
    margin = consts.support_margin
    if len(supporters) == 1:
        # single support face: COM must lie on the face (own footprint always contains its COM)
        sup = footprint_of(supporters[0])
        if sup.kind == "box":
            inside = min(sup.hx - abs(fp.cx - sup.cx), sup.hy - abs(fp.cy - sup.cy))
        else:
            inside = sup.r - math.hypot(fp.cx - sup.cx, fp.cy - sup.cy)
        return inside >= margin - 1e-9
    return com_supported(fp, [footprint_of(s) for s in supporters], margin)


def settle(s: WorldState, consts: EnvConstants = DEFAULT) -> tuple[WorldState, float]:
    """Quasi-static settling.

    Floating objects drop onto the highest surface under their footprint;
    objects whose center of mass is off their support fall to the table.
    Returns the settled state and the largest displacement of any object.
    """
    objs = dict(s.objects)
    skip = {s.held.object} if s.held is not None else set()
    movable = [n for n, o in objs.items() if o.category != "obstacle" and n not in skip]
    eps = consts.contact_eps
    for _ in range(4 * len(movable) + 4):
        changed = False
        for name in sorted(movable, key=lambda n: (objs[n].bottom, n)):
            obj = objs[name]
            bottom = obj.bottom
            if bottom <= eps:
                continue
            sups = _supporters(obj, objs, skip, consts)
            if sups:
                if is_stable(obj, sups, consts):
                    continue
                new_bottom = 0.0
            else:
                fp = footprint_of(obj)
                new_bottom = 0.0
                for other in objs.values():
                    if other.name == name or other.name in skip or other.category == "obstacle":
                        continue
                    surf = support_surface(other, consts)
                    if surf < bottom - eps and footprints_overlap(fp, footprint_of(other)):
                        new_bottom = max(new_bottom, surf)
            if abs(new_bottom - bottom) > eps:
                objs[name] = obj.moved_to(replace(obj.pose, z=new_bottom + obj.shape.half_height))
                changed = True
        if not changed:
            break
    disp = 0.0
    for name, obj in objs.items():
        a, b = s.objects[name].pose, obj.pose
        disp = max(disp, math.dist(a.point, b.point))
    if disp == 0.0:
        return s, 0.0
    return WorldState(objs, s.drawn_lines, s.held), disp


# --------------------------------------------------------------------------
# drawing
# --------------------------------------------------------------------------

def execute_draw_line(s: WorldState, p1x: float, p1y: float, p2x: float, p2y: float,
                      consts: EnvConstants = DEFAULT) -> MotionTrace:
    z = consts.pen_height
    up = z + consts.hover_offset
    drawn = s.with_line(((p1x, p1y), (p2x, p2y)))
    steps = (
        TraceStep("approach", (p1x, p1y, up), (p1x, p1y, z), s),
        TraceStep("act", (p1x, p1y, z), (p2x, p2y, z), drawn, pen_down=True),
        TraceStep("retreat", (p2x, p2y, z), (p2x, p2y, up), drawn),
    )
    return MotionTrace(GroundAction("draw_line", (p1x, p1y, p2x, p2y)), s, steps, tool="pen")


# --------------------------------------------------------------------------
# arrange: pick / place at a point
# --------------------------------------------------------------------------

def _gripper_collisions(state: WorldState, x: float, y: float, z: float, consts: EnvConstants,
                        exclude: set) -> tuple[str, ...]:
    """Objects that the gripper, closing at (x, y, z), would sit inside of."""
    r = consts.gripper_radius
    hits = []
    for o in state.objects.values():
        if o.name in exclude or o.category == "obstacle":
            continue
        fp = footprint_of(o)
        if o.category == "bowl" and footprint_within_disk(Footprint("disk", x, y, r=r), fp.cx, fp.cy, fp.r):
            continue
        if o.bottom + 1e-9 < z < o.top - 1e-9 and disk_overlaps(x, y, r, fp):
            hits.append(o.name)
    return tuple(hits)


def block_at(state: WorldState, x: float, y: float, z: float, consts: EnvConstants = DEFAULT) -> str | None:
    """The block whose top-center is within grasp tolerance of (x, y, z)."""
    best = None
    e = 1e-9
    for o in state.objects.values():
        if o.category != "block":
            continue
        if state.held is not None and state.held.object == o.name:
            continue
        if abs(x - o.pose.x) <= consts.grasp_tolerance_xy + e and \
                abs(y - o.pose.y) <= consts.grasp_tolerance_xy + e and \
                abs(z - o.top) <= consts.grasp_tolerance_z + e:
            # a grasp height at the seam of a stack belongs to the block it is inside of
            outside = not (o.bottom - e <= z <= o.top + e)
            key = (outside, math.dist((x, y, z), (o.pose.x, o.pose.y, o.top)), o.name)
            if best is None or key < best:
                best = key
    return None if best is None else best[2]


def _lifted(state: WorldState, name: str, dz: float) -> WorldState:
    obj = state[name]
    return state.with_poses({name: obj.pose.translated(dz=dz)})


def execute_pick(s: WorldState, x: float, y: float, z: float, consts: EnvConstants = DEFAULT) -> MotionTrace:
    if s.held is not None:
        raise SimError(f"Gripper is already holding object {s.held.object}", "already-holding")
    action = GroundAction("pick", (x, y, z))
    hover = (x, y, z + consts.hover_offset)
    target = (x, y, z)
    name = block_at(s, x, y, z, consts)
    collisions = _gripper_collisions(s, x, y, z, consts, exclude={name} if name else set())
    if name is None:
        outcome = GraspOutcome(None, "empty", collisions)
        steps = (
            TraceStep("approach", hover, target, s),
            TraceStep("act", target, target, s, grasp=outcome),
            TraceStep("retreat", target, hover, s),
        )
        return MotionTrace(action, s, steps, target=None)
    obj = s[name]
    grasp = Pose(x - obj.pose.x, y - obj.pose.y, z - obj.pose.z)
    closed = s.with_held(Held(name, grasp))
    lifted, _ = settle(_lifted(closed, name, consts.hover_offset), consts)
    steps = (
        TraceStep("approach", hover, target, s),
        TraceStep("act", target, target, closed, carrying=name, carry_start=obj.pose, carry_end=obj.pose,
                  grasp=GraspOutcome(name, "ok", collisions)),
        TraceStep("retreat", target, hover, lifted, carrying=name, carry_start=obj.pose,
                  carry_end=lifted[name].pose),
    )
    return MotionTrace(action, s, steps, target=name)


def _release(state: WorldState, name: str, pose: Pose, consts: EnvConstants):
    released = state.with_poses({name: pose}).with_held(None)
    settled, disp = settle(released, consts)
    return released, settled, disp


def _place_common(s: WorldState, action: GroundAction, obj_pose: Pose, grasp: Pose,
                  consts: EnvConstants) -> MotionTrace:
    name = s.held.object
    obj = s[name]
    # descend no lower than the table, or the floor of a bowl the object fits inside
    fp = footprint_of(obj.moved_to(obj_pose))
    floor = floor_under(fp, s, consts, exclude={name})
    lowest = obj_pose.z - obj.shape.half_height
    if lowest < floor:
        obj_pose = obj_pose.translated(dz=floor - lowest)
    gripper = pose_compose(obj_pose, grasp)
    target = gripper.point
    hover = (target[0], target[1], target[2] + consts.hover_offset)
    hover_obj = obj_pose.translated(dz=consts.hover_offset)
    carried = s.with_poses({name: hover_obj})
    at_target = carried.with_poses({name: obj_pose})
    _, settled, disp = _release(at_target, name, obj_pose, consts)
    steps = (
        TraceStep("approach", hover, target, at_target, carrying=name, carry_start=hover_obj, carry_end=obj_pose),
        TraceStep("act", target, target, settled, placed=name, displacement=disp),
        TraceStep("retreat", target, hover, settled),
    )
    return MotionTrace(action, s, steps, target=name)


def execute_place(s: WorldState, x: float, y: float, z: float, consts: EnvConstants = DEFAULT) -> MotionTrace:
    if s.held is None:
        raise SimError("Gripper is not holding any object", "not-holding")
    grasp = s.held.grasp
    gripper = Pose(x, y, z)
    obj_pose = pose_compose(gripper, grasp.inverse())
    obj_pose = replace(obj_pose, roll=s[s.held.object].pose.roll, pitch=s[s.held.object].pose.pitch,
                       yaw=s[s.held.object].pose.yaw)
    return _place_common(s, GroundAction("place", (x, y, z)), obj_pose, grasp, consts)


# --------------------------------------------------------------------------
# arrange: pick / place with grasps
# --------------------------------------------------------------------------

def finger_axis(gripper: Pose) -> tuple[float, float]:
    """Horizontal unit vector along which the fingers close."""
    R = gripper.rotation()
    ux, uy = float(R[0, 0]), float(R[1, 0])
    n = math.hypot(ux, uy)
    if n < 1e-9:
        return (1.0, 0.0)
    return (ux / n, uy / n)


def grasp_outcome(s: WorldState, name: str, grasp: Pose, consts: EnvConstants = DEFAULT) -> GraspOutcome:
    obj = s[name]
    gripper = pose_compose(obj.pose, grasp)
    px, py, pz = gripper.point
    fp = footprint_of(obj)
    collisions = _gripper_collisions(s, px, py, pz, consts, exclude={name})
    if not (obj.bottom - 1e-9 <= pz <= obj.top + 1e-9):
        return GraspOutcome(None, "empty", collisions)
    ux, uy = finger_axis(gripper)
    half = consts.gripper_max_opening / 2
    f1 = (px - half * ux, py - half * uy)
    f2 = (px + half * ux, py + half * uy)
    # material between the fingers: the closing segment crosses the footprint
    if fp.kind == "disk":
        between = point_segment_distance((fp.cx, fp.cy), f1, f2) <= fp.r + 1e-12
    else:
        between = _segment_hits_box(f1, f2, fp)
    if not between:
        return GraspOutcome(None, "empty", collisions)
    if obj.shape.width > consts.gripper_max_opening + 1e-12:
        return GraspOutcome(None, "too-wide", collisions)
    if not fp.contains_point(px, py):
        return GraspOutcome(None, "slip", collisions)
    return GraspOutcome(name, "ok", collisions)


def _segment_hits_box(a, b, fp: Footprint) -> bool:
    # Liang-Barsky clip against the rectangle
    t0, t1 = 0.0, 1.0
    dx, dy = b[0] - a[0], b[1] - a[1]
    for p, q in ((-dx, a[0] - (fp.cx - fp.hx)), (dx, (fp.cx + fp.hx) - a[0]),
                 (-dy, a[1] - (fp.cy - fp.hy)), (dy, (fp.cy + fp.hy) - a[1])):
        if p == 0:
            if q < 0:
                return False
            continue
        t = q / p
        if p < 0:
            t0 = max(t0, t)
        else:
            t1 = min(t1, t)
        if t0 > t1:
            return False
    return True


def execute_pick_grasp(s: WorldState, o: str, g: Pose, consts: EnvConstants = DEFAULT) -> MotionTrace:
    if o not in s:
        raise SimError(f"Object {o} does not exist", "unknown-object")
    if s.held is not None:
        raise SimError(f"Gripper is already holding object {s.held.object}", "already-holding")
    obj = s[o]
    gripper = pose_compose(obj.pose, g)
    target = gripper.point
    hover = (target[0], target[1], target[2] + consts.hover_offset)
    action = GroundAction("pick", (o, g))
    outcome = grasp_outcome(s, o, g, consts)
    if not outcome.ok:
        steps = (
            TraceStep("approach", hover, target, s),
            TraceStep("act", target, target, s, grasp=outcome),
            TraceStep("retreat", target, hover, s),
        )
        return MotionTrace(action, s, steps, target=o)
    closed = s.with_held(Held(o, g))
    lifted, _ = settle(_lifted(closed, o, consts.hover_offset), consts)
    steps = (
        TraceStep("approach", hover, target, s),
        TraceStep("act", target, target, closed, carrying=o, carry_start=obj.pose, carry_end=obj.pose,
                  grasp=outcome),
        TraceStep("retreat", target, hover, lifted, carrying=o, carry_start=obj.pose, carry_end=lifted[o].pose),
    )
    return MotionTrace(action, s, steps, target=o)


def execute_place_grasp(s: WorldState, o: str, g: Pose, p: Pose, consts: EnvConstants = DEFAULT) -> MotionTrace:
    if o not in s:
        raise SimError(f"Object {o} does not exist", "unknown-object")
    if s.held is None:
        raise SimError("Gripper is not holding any object", "not-holding")
    if s.held.object != o or not s.held.grasp.isclose(g):
        raise SimError(f"Gripper is holding object {s.held.object} with a different grasp", "grasp-mismatch")
    return _place_common(s, GroundAction("place", (o, g, p)), p, s.held.grasp, consts)


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

def execute(s: WorldState, action: GroundAction, consts: EnvConstants = DEFAULT) -> MotionTrace:
    """Run one validated ground action; the skill variant follows the parameter kinds."""
    p = action.params
    if action.name == "draw_line":
        return execute_draw_line(s, *p, consts=consts)
    by_object = bool(p) and isinstance(p[0], str)
    if action.name == "pick":
        if not by_object:
            return execute_pick(s, *p, consts=consts)
        return execute_pick_grasp(s, p[0], p[1], consts=consts)
    if action.name == "place":
        if not by_object:
            return execute_place(s, *p, consts=consts)
        return execute_place_grasp(s, p[0], p[1], p[2], consts=consts)
    raise SimError(f"no executor for skill {action.name!r}", "unknown-skill")
