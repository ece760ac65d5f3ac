"""Brute-force geometric references, written independently of the package code.

Each oracle generates its own random single-action traces and decides the
expected verdict by sampling or by elementary geometry, never by calling the
classifier helpers it is checked against.
"""

import math

import numpy as np

from ccsplan.config import DEFAULT
from ccsplan.constraints import check_collision, check_grasp, check_placement
from ccsplan.scene import Pose, WorldState, make_object
from ccsplan.sim import execute_draw_line, execute_pick, execute_pick_grasp, execute_place

N_SAMPLES = 10_000


# segment vs circle ------------------------------------------------------------

def sampled_min_distance(c, a, b, n: int = N_SAMPLES) -> float:
    t = np.linspace(0.0, 1.0, n + 1)
    xs = a[0] + t * (b[0] - a[0])
    ys = a[1] + t * (b[1] - a[1])
    return float(np.min(np.hypot(xs - c[0], ys - c[1])))


def pen_collision_case(rng):
    cx, cy = rng.uniform(-0.2, 0.2), rng.uniform(-0.7, -0.3)
    r = rng.uniform(0.01, 0.05)
    obs = make_object("o1", "obstacle", "blue", (cx, cy, 0.0), radius=r)
    a = (cx + rng.uniform(-0.12, 0.12), cy + rng.uniform(-0.12, 0.12))
    b = (cx + rng.uniform(-0.12, 0.12), cy + rng.uniform(-0.12, 0.12))
    trace = execute_draw_line(WorldState([obs]), a[0], a[1], b[0], b[1])
    expected = sampled_min_distance((cx, cy), a, b) < r
    got = bool(check_collision(trace))
    return expected, got


# finger gap -----------------------------------------------------------------------

YCB = ("banana", "strawberry", "meat_can", "power_drill", "apple", "pear")


def _rot(p: Pose):
    cr, sr = math.cos(p.roll), math.sin(p.roll)
    cp, sp = math.cos(p.pitch), math.sin(p.pitch)
    cy, sy = math.cos(p.yaw), math.sin(p.yaw)
    rx = np.array([[1, 0, 0], [0, cr, -sr], [0, sr, cr]])
    ry = np.array([[cp, 0, sp], [0, 1, 0], [-sp, 0, cp]])
    rz = np.array([[cy, -sy, 0], [sy, cy, 0], [0, 0, 1]])
    return rx @ ry @ rz


def finger_gap_ok(obj, grasp: Pose, opening: float = DEFAULT.gripper_max_opening, n: int = N_SAMPLES) -> bool:
    """Would a gripper at obj.pose * grasp close on obj?

    The closing stroke is sampled from one fingertip to the other; the object
    must have material on the stroke, fit inside the opening, and contain the
    palm point so it does not slip.
    """
    R0 = _rot(obj.pose)
    world = R0 @ np.array(grasp.point) + np.array(obj.pose.point)
    Rg = R0 @ _rot(grasp)
    axis = Rg[:2, 0]
    if np.hypot(*axis) < 1e-9:
        axis = np.array([1.0, 0.0])
    axis = axis / np.hypot(*axis)
    half_h = obj.shape.height / 2
    if not (obj.pose.z - half_h - 1e-9 <= world[2] <= obj.pose.z + half_h + 1e-9):
        return False
    t = np.linspace(-opening / 2, opening / 2, n + 1)
    px = world[0] + t * axis[0]
    py = world[1] + t * axis[1]
    r = obj.shape.radius
    material = np.hypot(px - obj.pose.x, py - obj.pose.y) <= r
    if not material.any():
        return False
    if 2 * r > opening:
        return False
    return math.hypot(world[0] - obj.pose.x, world[1] - obj.pose.y) <= r


def box_grasp_ok(block, x, y, z, tol_xy=DEFAULT.grasp_tolerance_xy, tol_z=DEFAULT.grasp_tolerance_z) -> bool:
    top = block.pose.z + block.shape.half_extents[2]
    return abs(x - block.pose.x) <= tol_xy and abs(y - block.pose.y) <= tol_xy and abs(z - top) <= tol_z


def grasp_case(rng):
    if rng.random() < 0.5:
        cat = YCB[int(rng.integers(len(YCB)))]
        probe = make_object("o1", cat, "red", (0, 0, 0))
        obj = make_object("o1", cat, "red", (rng.uniform(-0.2, 0.2), rng.uniform(-0.7, -0.3),
                                             probe.shape.height / 2))
        g = Pose(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), rng.uniform(-0.06, 0.06),
                 0.0, math.pi, rng.uniform(-math.pi, math.pi))
        trace = execute_pick_grasp(WorldState([obj]), "o1", g)
        expected = not finger_gap_ok(obj, g)
    else:
        obj = make_object("o1", "block", "red", (rng.uniform(-0.2, 0.2), rng.uniform(-0.7, -0.3), 0.02))
        x = obj.pose.x + rng.uniform(-0.03, 0.03)
        y = obj.pose.y + rng.uniform(-0.03, 0.03)
        z = rng.uniform(0.01, 0.07)
        trace = execute_pick(WorldState([obj]), x, y, z)
        expected = not box_grasp_ok(obj, x, y, z)
    got = bool(check_grasp(trace))
    return expected, got


# support polygon -----------------------------------------------------------------------

def _hull(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _in_convex(p, poly) -> bool:
    if len(poly) < 3:
        return False
    sign = 0
    for i in range(len(poly)):
        a, b = poly[i], poly[(i + 1) % len(poly)]
        c = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        if abs(c) < 1e-12:
            continue
        s = 1 if c > 0 else -1
        if sign and s != sign:
            return False
        sign = s
    return True


def support_stays(top_xy, supports_xy, h: float = 0.02) -> bool:
    """COM inside the convex hull of the rectangular contact patches."""
    corners = []
    for sx, sy in supports_xy:
        x0, x1 = max(top_xy[0] - h, sx - h), min(top_xy[0] + h, sx + h)
        y0, y1 = max(top_xy[1] - h, sy - h), min(top_xy[1] + h, sy + h)
        if x1 - x0 > 1e-12 and y1 - y0 > 1e-12:
            corners += [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
    return _in_convex(top_xy, _hull(corners))


def placement_case(rng):
    a = (rng.uniform(-0.1, 0.1), rng.uniform(-0.6, -0.4))
    supports = [a]
    if rng.random() < 0.6:
        supports.append((a[0] + 0.04 + rng.uniform(0.0, 0.03), a[1] + rng.uniform(-0.035, 0.035)))
    mid = (sum(p[0] for p in supports) / len(supports), sum(p[1] for p in supports) / len(supports))
    top = (mid[0] + rng.uniform(-0.035, 0.035), mid[1] + rng.uniform(-0.035, 0.035))
    objs = [make_object(f"s{i}", "block", "red", (x, y, 0.02)) for i, (x, y) in enumerate(supports)]
    objs.append(make_object("t", "block", "green", (0.25, -0.25, 0.02)))
    held = execute_pick(WorldState(objs), 0.25, -0.25, 0.04).final
    trace = execute_place(held, top[0], top[1], 0.08)
    expected = not support_stays(top, supports)
    got = bool(check_placement(trace))
    return expected, got


CASES = {"collision": pen_collision_case, "grasp": grasp_case, "placement": placement_case}


def disagreements(constraint: str, n: int = 1000, seed: int = 0) -> tuple[int, int]:
    """(number of disagreements, number of positive oracle verdicts) over n random traces."""
    rng = np.random.default_rng(seed)
    bad = positives = 0
    for _ in range(n):
        expected, got = CASES[constraint](rng)
        positives += expected
        bad += expected != got
    return bad, positives
