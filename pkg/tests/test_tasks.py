import math
import random

import numpy as np
import pytest

from conftest import block, obstacle
from ccsplan.config import DEFAULT
from ccsplan.errors import TaskError
from ccsplan.scene import WorldState, make_object, state_to_json
from ccsplan.sim import reachable, settle
from ccsplan.tasks import (
    GoalVerdict, catalog, checker_ids, closed_cycle, evaluate_goal, get_task, in_bowl, line_deviation,
    make_initial_state, proper_crossings, register_checker,
)

SEEDS = range(15)


# initial states -----------------------------------------------------------------

@pytest.mark.parametrize("seed", SEEDS)
def test_drawing_scene(seed):
    s = make_initial_state(get_task("star", seed))
    obs = list(s.objects.values())
    assert len(obs) == 5 and all(o.category == "obstacle" for o in obs)
    lo, hi = DEFAULT.obstacle_radius_range
    assert all(lo <= o.shape.radius <= hi for o in obs)
    for i, a in enumerate(obs):
        for b in obs[i + 1:]:
            assert math.hypot(a.pose.x - b.pose.x, a.pose.y - b.pose.y) >= a.shape.radius + b.shape.radius


@pytest.mark.parametrize("seed", SEEDS)
def test_blocks_and_bowls_scene(seed):
    s = make_initial_state(get_task("line", seed))
    cats = sorted(o.category for o in s.objects.values())
    assert cats == ["block"] * 6 + ["bowl"] * 2
    assert all(o.pose.z == pytest.approx(0.02) for o in s.objects.values() if o.category == "block")


@pytest.mark.parametrize("seed", SEEDS)
def test_unstack_scene_has_block_on_green(seed):
    s = make_initial_state(get_task("unstack", seed))
    green = [o for o in s.objects.values() if o.category == "block" and o.color == "green"]
    assert len(green) == 1
    g = green[0]
    above = [o for o in s.objects.values()
             if o.name != g.name and abs(o.bottom - g.top) < 1e-9 and math.hypot(o.pose.x - g.pose.x,
                                                                                 o.pose.y - g.pose.y) < 1e-9]
    assert len(above) == 1


@pytest.mark.parametrize("task", [t.task_id for t in catalog()])
def test_initial_states_are_settled_reachable_and_seeded(task):
    for seed in range(5):
        spec = get_task(task, seed)
        s = make_initial_state(spec)
        assert settle(s)[1] == 0.0
        assert all(reachable(o.pose.point) for o in s.objects.values())
        assert state_to_json(make_initial_state(spec)) == state_to_json(s)
    assert state_to_json(make_initial_state(get_task(task, 0))) != state_to_json(make_initial_state(get_task(task, 1)))


@pytest.mark.parametrize("task", ["packing", "ycb_packing"])
def test_packing_scenes_start_unsolved(task):
    for seed in SEEDS:
        spec = get_task(task, seed)
        assert not evaluate_goal(spec, make_initial_state(spec)).success


def test_unknown_task():
    with pytest.raises(TaskError) as e:
        get_task("juggle")
    assert e.value.code == "unknown-task"


def test_placement_failure_when_table_too_small():
    from dataclasses import replace
    tiny = replace(DEFAULT, table_bounds=((-0.03, 0.03), (-0.53, -0.47), (0.0, 0.0)), placement_attempts=50)
    with pytest.raises(TaskError) as e:
        make_initial_state(get_task("line", 0), tiny)
    assert e.value.code == "placement-failure"


# checkers on hand-built ground truth ---------------------------------------------------

def _star_lines(cx=0.0, cy=-0.5, r=0.1, rot=0.0):
    pts = [(cx + r * math.cos(rot + math.pi / 2 + 2 * math.pi * k / 5),
            cy + r * math.sin(rot + math.pi / 2 + 2 * math.pi * k / 5)) for k in range(5)]
    order = [0, 2, 4, 1, 3, 0]
    return tuple((pts[order[i]], pts[order[i + 1]]) for i in range(5))


def test_star_ground_truth():
    s = WorldState([obstacle("o1", 0.25, -0.25, 0.02)], _star_lines())
    assert evaluate_goal("star", s) == GoalVerdict(True)
    assert proper_crossings(_star_lines()) == 5
    assert len(closed_cycle(_star_lines(), DEFAULT.endpoint_tol)) == 5


def test_star_fails_when_endpoint_moves_twice_tolerance():
    lines = list(_star_lines())
    (a, b) = lines[2]
    lines[2] = (a, (b[0] + 2 * DEFAULT.endpoint_tol, b[1]))
    assert not evaluate_goal("star", WorldState([], tuple(lines))).success


def test_pentagon_is_not_a_star():
    pts = [(0.1 * math.cos(2 * math.pi * k / 5), -0.5 + 0.1 * math.sin(2 * math.pi * k / 5)) for k in range(5)]
    lines = tuple((pts[k], pts[(k + 1) % 5]) for k in range(5))
    v = evaluate_goal("star", WorldState([], lines))
    assert not v.success and "self-intersections" in v.diagnostics


def test_star_through_obstacle_fails():
    v = evaluate_goal("star", WorldState([obstacle("o1", 0.0, -0.41, 0.01)], _star_lines()))
    assert not v.success and "o1" in v.diagnostics


def test_enclosed_and_arrow():
    square = (((-0.1, -0.6), (0.1, -0.6)), ((0.1, -0.6), (0.1, -0.4)), ((0.1, -0.4), (-0.1, -0.4)),
              ((-0.1, -0.4), (-0.1, -0.6)))
    two = [obstacle("o1", -0.03, -0.5, 0.02), obstacle("o2", 0.04, -0.5, 0.02)]
    assert evaluate_goal("enclosed", WorldState(two, square)).success
    assert not evaluate_goal("enclosed", WorldState(two[:1] + [obstacle("o2", 0.25, -0.5, 0.02)], square)).success
    tip = (0.0, -0.45)
    arrow = ((( 0.0, -0.3), tip), (tip, (-0.03, -0.38)), (tip, (0.03, -0.38)))
    obs = [obstacle("o1", 0.0, -0.6, 0.05), obstacle("o2", 0.2, -0.3, 0.02)]
    assert evaluate_goal("arrow", WorldState(obs, arrow)).success
    backwards = (((0.0, -0.45), (0.0, -0.3)), ((0.0, -0.3), (-0.03, -0.22)), ((0.0, -0.3), (0.03, -0.22)))
    assert not evaluate_goal("arrow", WorldState(obs, backwards)).success


def _line_blocks(offset=0.0):
    return [block(f"o{i + 1}", -0.1 + 0.05 * i, -0.5 + (offset if i == 2 else 0.0)) for i in range(5)]


def test_line_ground_truth_and_perturbation():
    assert evaluate_goal("line-5", WorldState(_line_blocks())).success
    assert not evaluate_goal("line-5", WorldState(_line_blocks(2 * DEFAULT.line_deviation))).success
    assert line_deviation([(0, 0), (1, 1), (2, 2)]) == pytest.approx(0.0, abs=1e-12)


def test_line_ignores_stacked_blocks():
    objs = _line_blocks()[:4] + [block("o5", -0.1, -0.5, 0.06)]
    assert not evaluate_goal("line-5", WorldState(objs)).success


def test_packing_ground_truth():
    r = DEFAULT.packing_radius
    objs = [block(f"o{i}", 0.03 * math.cos(i), -0.5 + 0.03 * math.sin(i)) for i in range(5)]
    assert evaluate_goal("packing", WorldState(objs)).success
    objs[0] = block("o0", 2 * r, -0.5)
    v = evaluate_goal("packing", WorldState(objs))
    assert not v.success and "o0" in v.diagnostics


def test_pyramid_ground_truth():
    base = [block("o1", 0.0, -0.5), block("o2", 0.04, -0.5)]
    assert evaluate_goal("pyramid", WorldState(base + [block("o3", 0.02, -0.5, 0.06)])).success
    lifted = block("o3", 0.02, -0.5, 0.06 + 2 * DEFAULT.rest_height_tol)
    assert not evaluate_goal("pyramid", WorldState(base + [lifted])).success
    spread = [block("o1", 0.0, -0.5), block("o2", 0.2, -0.5), block("o3", 0.0, -0.5, 0.06)]
    assert not evaluate_goal("pyramid", WorldState(spread)).success


def test_green_in_bowl():
    bowl = make_object("o9", "bowl", "green", (0.1, -0.5, 0.03))
    inside = block("o1", 0.1, -0.5, 0.03, color="green")
    assert in_bowl(inside, bowl)
    assert evaluate_goal("green-in-bowl", WorldState([bowl, inside])).success
    outside = block("o1", 0.2, -0.5, color="green")
    assert not evaluate_goal("green-in-bowl", WorldState([bowl, outside])).success


def test_ycb_stack():
    can = make_object("o1", "meat_can", "blue", (0.0, -0.5, 0.04))
    berry = make_object("o2", "strawberry", "red", (0.0, -0.5, 0.08 + 0.0225))
    assert evaluate_goal("ycb-stack", WorldState([can, berry])).success
    apart = make_object("o2", "strawberry", "red", (0.2, -0.5, 0.0225))
    assert not evaluate_goal("ycb-stack", WorldState([can, apart])).success


# invariance ---------------------------------------------------------------------------

def _relabel(s: WorldState, rnd: random.Random) -> WorldState:
    names = [f"x{i}" for i in range(len(s.objects))]
    rnd.shuffle(names)
    objs = [make_object(n, o.category, o.color, o.pose.as_list(),
                        o.shape.radius if o.category == "obstacle" else None)
            for n, o in zip(names, s.objects.values())]
    lines = [(b, a) if rnd.random() < 0.5 else (a, b) for a, b in s.drawn_lines]
    rnd.shuffle(lines)
    return WorldState(objs, tuple(lines))


CASES = [
    ("star", WorldState([obstacle("o1", 0.25, -0.25, 0.02)], _star_lines())),
    ("line-5", WorldState(_line_blocks())),
    ("line-5", WorldState(_line_blocks(0.03))),
    ("pyramid", WorldState([block("o1", 0.0, -0.5), block("o2", 0.04, -0.5), block("o3", 0.02, -0.5, 0.06)])),
    ("packing", WorldState([block("o1", 0.0, -0.5), block("o2", 0.1, -0.5)])),
]


@pytest.mark.parametrize("checker,state", CASES)
def test_verdict_invariant_under_renaming_and_reordering(checker, state):
    want = evaluate_goal(checker, state).success
    rnd = random.Random(0)
    for _ in range(20):
        assert evaluate_goal(checker, _relabel(state, rnd)).success == want


# registry --------------------------------------------------------------------------

def test_checker_registry():
    assert {"star", "arrow", "enclosed", "pyramid", "line-5", "packing", "green-in-bowl",
            "ycb-packing", "ycb-stack"} <= set(checker_ids())
    register_checker("always-test", lambda s, c: GoalVerdict(True))
    assert evaluate_goal("always-test", WorldState()).success
    with pytest.raises(TaskError) as e:
        register_checker("always-test", lambda s, c: GoalVerdict(True))
    assert e.value.code == "duplicate-id"
    with pytest.raises(TaskError) as e:
        evaluate_goal("nope", WorldState())
    assert e.value.code == "unknown-checker"


def test_verdict_invariant():
    with pytest.raises(ValueError):
        GoalVerdict(True, "but why")


def test_every_task_has_a_registered_checker():
    for t in catalog():
        assert t.checker in checker_ids()
        assert np.isfinite(t.budget)
