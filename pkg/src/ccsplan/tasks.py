"""Benchmark tasks: seeded initial scenes and programmatic goal checkers."""

from __future__ import annotations

import itertools
import json
import math
import zlib
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT, EnvConstants
from .errors import TaskError
from .geometry import footprint_of, footprints_overlap, point_in_polygon, point_segment_distance, segments_cross
from .scene import SceneObject, WorldState, make_object

ENV_BUDGETS = {"drawing": 10000, "arrange_blocks": 1000, "arrange_ycb": 1000}


@dataclass(frozen=True)
class TaskSpec:
    env: str
    task_id: str
    goal: str
    checker: str
    layout: str
    budget: int
    seed: int = 0

    def __post_init__(self):
        if self.env not in ENV_BUDGETS:
            raise TaskError(f"unknown environment {self.env!r}", "unknown-task")

    def with_seed(self, seed: int) -> "TaskSpec":
        return replace(self, seed=int(seed))

    def to_json(self) -> dict:
        return {"env": self.env, "task_id": self.task_id, "goal": self.goal, "checker": self.checker,
                "layout": self.layout, "budget": self.budget, "seed": self.seed}


@lru_cache(maxsize=None)
def _catalog() -> tuple[TaskSpec, ...]:
    data = json.loads(resources.files("ccsplan").joinpath("data/tasks.json").read_text())
    specs = []
    for t in data["tasks"]:
        specs.append(TaskSpec(t["env"], t["id"], t["goal"], t["checker"], t["layout"],
                              t.get("budget", ENV_BUDGETS[t["env"]])))
    return tuple(specs)


def catalog() -> list[TaskSpec]:
    return list(_catalog())


def get_task(task_id: str, seed: int = 0) -> TaskSpec:
    for t in _catalog():
        if t.task_id == task_id:
            return t.with_seed(seed)
    raise TaskError(f"unknown task {task_id!r}", "unknown-task")


# --------------------------------------------------------------------------
# initial states
# --------------------------------------------------------------------------

def task_rng(spec: TaskSpec) -> np.random.Generator:
    # crc32 rather than hash(): str hashing is salted per process
    return np.random.default_rng(np.random.SeedSequence([spec.seed, zlib.crc32(spec.task_id.encode())]))


def _radius(obj: SceneObject) -> float:
    fp = footprint_of(obj)
    return math.hypot(fp.hx, fp.hy) if fp.kind == "box" else fp.r


class _Placer:
    """Rejection sampler for non-overlapping positions on the table."""

    def __init__(self, rng: np.random.Generator, consts: EnvConstants, keep_out: float = 0.0):
        self.rng = rng
        self.consts = consts
        self.placed: list[SceneObject] = []
        # disk around the table center left empty (the packing region)
        self.keep_out = keep_out

    def put(self, name: str, category: str, color: str, radius: float | None = None) -> SceneObject:
        (x0, x1), (y0, y1), _ = self.consts.table_bounds
        gap = self.consts.obstacle_clearance
        for _ in range(self.consts.placement_attempts):
            probe = make_object(name, category, color, (0.0, 0.0, 0.0), radius)
            r = _radius(probe)
            if x1 - x0 < 2 * r or y1 - y0 < 2 * r:
                break
            x = float(self.rng.uniform(x0 + r, x1 - r))
            y = float(self.rng.uniform(y0 + r, y1 - r))
            z = probe.shape.half_height
            cx, cy = self.consts.table_center[0], self.consts.table_center[1]
            if self.keep_out and math.hypot(x - cx, y - cy) < self.keep_out + r + gap:
                continue
            if all(math.hypot(x - o.pose.x, y - o.pose.y) >= r + _radius(o) + gap for o in self.placed):
                obj = make_object(name, category, color, (x, y, z), radius)
                self.placed.append(obj)
                return obj
        raise TaskError(f"could not place {name} after {self.consts.placement_attempts} attempts",
                        "placement-failure")


def _drawing(rng, consts: EnvConstants) -> WorldState:
    placer = _Placer(rng, consts)
    lo, hi = consts.obstacle_radius_range
    for i in range(5):
        r = float(rng.uniform(lo, hi))
        placer.put(f"o{i + 1}", "obstacle", consts.colors[i % len(consts.colors)], r)
    return WorldState({o.name: o for o in placer.placed})


BLOCK_COLORS = ("red", "green", "blue", "yellow", "purple", "orange", "pink", "cyan")


def _blocks_and_bowls(rng, consts: EnvConstants) -> WorldState:
    placer = _Placer(rng, consts)
    for i, color in enumerate(("blue", "red")):
        placer.put(f"o{i + 7}", "bowl", color)
    for i in range(6):
        placer.put(f"o{i + 1}", "block", BLOCK_COLORS[i])
    return WorldState({o.name: o for o in placer.placed})


def _red_blocks(rng, consts: EnvConstants) -> WorldState:
    placer = _Placer(rng, consts, keep_out=consts.packing_radius)
    for i in range(5):
        placer.put(f"o{i + 1}", "block", "red")
    return WorldState({o.name: o for o in placer.placed})


def _unstack(rng, consts: EnvConstants) -> WorldState:
    placer = _Placer(rng, consts)
    placer.put("o9", "bowl", "green")
    colors = [c for c in BLOCK_COLORS if c != "green"]
    for i in range(7):
        color = "green" if i == 2 else colors[i % len(colors)]
        placer.put(f"o{i + 1}", "block", color)
    base = next(o for o in placer.placed if o.name == "o3")
    # o8 sits directly on the green block
    top = make_object("o8", "block", colors[3], (base.pose.x, base.pose.y, base.pose.z + consts.block_size))
    return WorldState({o.name: o for o in placer.placed + [top]})


YCB_COLORS = {"banana": "yellow", "strawberry": "red", "meat_can": "blue", "power_drill": "orange",
              "apple": "red", "pear": "green"}


def _ycb(categories: Sequence[str], packing: bool = False):
    def build(rng, consts: EnvConstants) -> WorldState:
        placer = _Placer(rng, consts, keep_out=consts.packing_radius if packing else 0.0)
        for i, cat in enumerate(categories):
            placer.put(f"o{i + 1}", cat, YCB_COLORS[cat])
        return WorldState({o.name: o for o in placer.placed})
    return build


LAYOUTS: dict[str, Callable[[np.random.Generator, EnvConstants], WorldState]] = {
    "obstacles": _drawing,
    "blocks_and_bowls": _blocks_and_bowls,
    "red_blocks": _red_blocks,
    "unstack": _unstack,
    "ycb_packing": _ycb(("banana", "strawberry", "meat_can"), packing=True),
    "ycb_stacking": _ycb(("banana", "power_drill", "meat_can", "strawberry", "apple", "pear")),
}


def make_initial_state(spec: TaskSpec, consts: EnvConstants = DEFAULT) -> WorldState:
    try:
        build = LAYOUTS[spec.layout]
    except KeyError:
        raise TaskError(f"unknown layout {spec.layout!r}", "unknown-task") from None
    return build(task_rng(spec), consts)


# --------------------------------------------------------------------------
# goal checking
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GoalVerdict:
    success: bool
    diagnostics: str = ""

    def __post_init__(self):
        if self.success and self.diagnostics:
            raise ValueError("a successful verdict carries no diagnostics")


OK = GoalVerdict(True)


def _fail(msg: str) -> GoalVerdict:
    return GoalVerdict(False, msg)


Checker = Callable[[WorldState, EnvConstants], GoalVerdict]
_CHECKERS: dict[str, Checker] = {}


def register_checker(checker_id: str, predicate: Checker) -> None:
    if checker_id in _CHECKERS:
        raise TaskError(f"checker {checker_id!r} is already registered", "duplicate-id")
    _CHECKERS[checker_id] = predicate


def checker_ids() -> list[str]:
    return sorted(_CHECKERS)


def evaluate_goal(spec: TaskSpec | str, final: WorldState, history=None,
                  consts: EnvConstants = DEFAULT) -> GoalVerdict:
    """Run the task's checker on the final state.

    ``history`` (the executed traces) is accepted for interface symmetry; the
    registered checkers only look at the final state.
    """
    cid = spec if isinstance(spec, str) else spec.checker
    try:
        fn = _CHECKERS[cid]
    except KeyError:
        raise TaskError(f"no checker registered as {cid!r}", "unknown-checker") from None
    return fn(final, consts)


# drawing helpers -------------------------------------------------------------

def _obstacles(s: WorldState) -> list[SceneObject]:
    return [o for o in s.objects.values() if o.category == "obstacle"]


def _collision_free(s: WorldState) -> str:
    for a, b in s.drawn_lines:
        for o in _obstacles(s):
            if point_segment_distance((o.pose.x, o.pose.y), a, b) < o.shape.radius:
                return f"a drawn line crosses obstacle {o.name}"
    return ""


def _vertices(segs, tol: float):
    """Cluster segment endpoints; returns vertex list and per-segment vertex index pairs."""
    verts: list[tuple[float, float]] = []
    ends = []
    for seg in segs:
        pair = []
        for p in seg:
            for i, v in enumerate(verts):
                if math.hypot(p[0] - v[0], p[1] - v[1]) <= tol:
                    pair.append(i)
                    break
            else:
                verts.append(tuple(p))
                pair.append(len(verts) - 1)
        ends.append(tuple(pair))
    return verts, ends


def closed_cycle(segs, tol: float) -> list[tuple[float, float]] | None:
    """Vertices in order if the segments form one simple closed loop, else None."""
    if len(segs) < 3:
        return None
    verts, ends = _vertices(segs, tol)
    if len(verts) != len(segs) or any(a == b for a, b in ends):
        return None
    adj: dict[int, list[int]] = {i: [] for i in range(len(verts))}
    for a, b in ends:
        adj[a].append(b)
        adj[b].append(a)
    if any(len(v) != 2 for v in adj.values()):
        return None
    order = [0]
    prev, cur = None, 0
    while True:
        nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
        if nxt == 0:
            break
        order.append(nxt)
        prev, cur = cur, nxt
    if len(order) != len(verts):
        return None
    return [verts[i] for i in order]


def proper_crossings(segs) -> int:
    return sum(1 for s, t in itertools.combinations(segs, 2) if segments_cross(s[0], s[1], t[0], t[1]))


def check_star(s: WorldState, consts: EnvConstants) -> GoalVerdict:
    segs = s.drawn_lines
    if len(segs) != 5:
        return _fail(f"expected 5 segments, found {len(segs)}")
    if closed_cycle(segs, consts.endpoint_tol) is None:
        return _fail("segments do not form a closed loop")
    n = proper_crossings(segs)
    if n != 5:
        return _fail(f"expected 5 self-intersections, found {n}")
    return _fail(msg) if (msg := _collision_free(s)) else OK


def _angle(u, v) -> float:
    nu, nv = math.hypot(*u), math.hypot(*v)
    if nu == 0 or nv == 0:
        return 0.0
    c = max(-1.0, min(1.0, (u[0] * v[0] + u[1] * v[1]) / (nu * nv)))
    return math.degrees(math.acos(c))


def check_arrow(s: WorldState, consts: EnvConstants) -> GoalVerdict:
    segs = s.drawn_lines
    if len(segs) != 3:
        return _fail(f"expected 3 segments, found {len(segs)}")
    obstacles = _obstacles(s)
    if not obstacles:
        return _fail("no obstacle to point at")
    target = max(obstacles, key=lambda o: (o.shape.radius, o.name))
    c = (target.pose.x, target.pose.y)
    verts, ends = _vertices(segs, consts.endpoint_tol)
    lo, hi = consts.arrow_angle_range
    for tip in range(len(verts)):
        if not all(tip in e for e in ends):
            continue
        t = verts[tip]
        for k in range(3):
            shaft_end = verts[ends[k][1] if ends[k][0] == tip else ends[k][0]]
            if math.dist(t, c) >= math.dist(shaft_end, c):
                continue
            back = (shaft_end[0] - t[0], shaft_end[1] - t[1])
            sides = []
            for j in range(3):
                if j == k:
                    continue
                h = verts[ends[j][1] if ends[j][0] == tip else ends[j][0]]
                d = (h[0] - t[0], h[1] - t[1])
                if not lo < _angle(back, d) < hi:
                    break
                sides.append(back[0] * d[1] - back[1] * d[0])
            else:
                if sides[0] * sides[1] < 0:
                    return _fail(msg) if (msg := _collision_free(s)) else OK
    return _fail(f"no arrowhead pointing at the largest obstacle {target.name}")


def check_enclosed(s: WorldState, consts: EnvConstants) -> GoalVerdict:
    poly = closed_cycle(s.drawn_lines, consts.endpoint_tol)
    if poly is None:
        return _fail("segments do not form a closed polygon")
    inside = [o.name for o in _obstacles(s) if point_in_polygon((o.pose.x, o.pose.y), poly)]
    if len(inside) < 2:
        return _fail(f"polygon encloses {len(inside)} obstacle center(s), need 2")
    return _fail(msg) if (msg := _collision_free(s)) else OK


# arrangement helpers -----------------------------------------------------------

def _blocks(s: WorldState) -> list[SceneObject]:
    return [o for o in s.objects.values() if o.category == "block"]


def _on_table(o: SceneObject, consts: EnvConstants) -> bool:
    return abs(o.bottom) <= consts.rest_height_tol


def check_pyramid(s: WorldState, consts: EnvConstants) -> GoalVerdict:
    blocks = _blocks(s)
    base = [b for b in blocks if _on_table(b, consts)]
    for a, b in itertools.combinations(base, 2):
        if math.hypot(a.pose.x - b.pose.x, a.pose.y - b.pose.y) > consts.pyramid_gap_factor * consts.block_size:
            continue
        fa, fb = footprint_of(a), footprint_of(b)
        for c in blocks:
            if c.name in (a.name, b.name):
                continue
            if abs(c.bottom - a.top) > consts.rest_height_tol or abs(c.bottom - b.top) > consts.rest_height_tol:
                continue
            fc = footprint_of(c)
            if footprints_overlap(fc, fa) and footprints_overlap(fc, fb):
                return OK
    return _fail("no two adjacent table blocks carry a third block across both")


def line_deviation(points) -> float:
    """Largest perpendicular distance to the total-least-squares line through the points."""
    pts = np.asarray(points, dtype=float)
    centered = pts - pts.mean(axis=0)
    _, _, vt = np.linalg.svd(centered)
    normal = vt[-1]
    return float(np.max(np.abs(centered @ normal)))


def make_line_checker(n: int) -> Checker:
    def check(s: WorldState, consts: EnvConstants) -> GoalVerdict:
        on_table = [b for b in _blocks(s) if _on_table(b, consts)]
        if len(on_table) < n:
            return _fail(f"only {len(on_table)} blocks rest on the table, need {n}")
        best = min(line_deviation([(b.pose.x, b.pose.y) for b in combo])
                   for combo in itertools.combinations(on_table, n))
        if best > consts.line_deviation:
            return _fail(f"best {n}-block line deviates by {best:.4f} m")
        return OK
    return check


def _within_center(objs: Sequence[SceneObject], consts: EnvConstants) -> GoalVerdict:
    if not objs:
        return _fail("no objects to pack")
    cx, cy = consts.table_center[0], consts.table_center[1]
    far = [o.name for o in objs if math.hypot(o.pose.x - cx, o.pose.y - cy) > consts.packing_radius + 1e-12]
    if far:
        return _fail(f"outside the packing radius: {', '.join(far)}")
    return OK


def check_packing(s: WorldState, consts: EnvConstants) -> GoalVerdict:
    return _within_center(_blocks(s), consts)


def check_ycb_packing(s: WorldState, consts: EnvConstants) -> GoalVerdict:
    return _within_center([o for o in s.objects.values() if o.category not in ("bowl", "obstacle")], consts)


def in_bowl(obj: SceneObject, bowl: SceneObject) -> bool:
    if math.hypot(obj.pose.x - bowl.pose.x, obj.pose.y - bowl.pose.y) > bowl.shape.radius:
        return False
    return bowl.bottom < obj.pose.z < bowl.top


def check_green_in_bowl(s: WorldState, consts: EnvConstants) -> GoalVerdict:
    bowls = [o for o in s.objects.values() if o.category == "bowl"]
    green = [b for b in _blocks(s) if b.color == "green"]
    if not green:
        return _fail("there is no green block")
    for b in green:
        if any(in_bowl(b, bowl) for bowl in bowls):
            return OK
    return _fail("no green block is inside a bowl")


def check_ycb_stack(s: WorldState, consts: EnvConstants) -> GoalVerdict:
    items = [o for o in s.objects.values() if o.category not in ("bowl", "obstacle")]
    for a, b in itertools.permutations(items, 2):
        if abs(a.bottom - b.top) <= consts.rest_height_tol and footprints_overlap(footprint_of(a), footprint_of(b)):
            return OK
    return _fail("no object rests on top of another")


def check_sort(s: WorldState, consts: EnvConstants) -> GoalVerdict:
    bowls = [o for o in s.objects.values() if o.category == "bowl"]
    stray = [b.name for b in _blocks(s) if not any(bw.color == b.color and in_bowl(b, bw) for bw in bowls)]
    if stray:
        return _fail(f"not in a bowl of their color: {', '.join(stray)}")
    return OK


for _cid, _fn in (("star", check_star), ("arrow", check_arrow), ("enclosed", check_enclosed),
                  ("pyramid", check_pyramid), ("line-3", make_line_checker(3)), ("line-5", make_line_checker(5)),
                  ("packing", check_packing), ("green-in-bowl", check_green_in_bowl),
                  ("ycb-packing", check_ycb_packing), ("ycb-stack", check_ycb_stack), ("sort", check_sort)):
    register_checker(_cid, _fn)
