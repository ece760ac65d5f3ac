"""Write the bundled replay fixtures (src/ccsplan/data/replay/<task>/<approach>.json).

Each fixture is a JSON array of LLM responses served in order.  The texts are
hand-written stand-ins for recorded model output: plausible first attempts,
some of which fail, followed by corrected programs.
"""

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1] / "src" / "ccsplan" / "data" / "replay"


def code(text: str, lead: str = "") -> str:
    body = "```python\n" + text.strip("\n") + "\n```"
    return (lead.strip() + "\n\n" + body) if lead else body


# --------------------------------------------------------------------------
# drawing
# --------------------------------------------------------------------------

STAR_FIXED = '''
def gen_plan(init, angle):
    cx, cy, r = 0.0, -0.5, 0.12
    pts = []
    for k in range(5):
        a = angle + PI / 2 + k * 2 * PI / 5
        pts.append([cx + r * cos(a), cy + r * sin(a)])
    plan = []
    for k in range(5):
        p, q = pts[k], pts[(k + 2) % 5]
        plan.append(Action("draw_line", [p[0], p[1], q[0], q[1]]))
    return plan

def gen_domain(init):
    return {"angle": DiscreteSampler([0, PI / 10, PI / 5])}
'''

STAR_OPEN = '''
def gen_plan(init, cx, cy, r, angle):
    pts = []
    for k in range(5):
        a = angle + PI / 2 + k * 2 * PI / 5
        pts.append([cx + r * cos(a), cy + r * sin(a)])
    plan = []
    for k in range(5):
        p, q = pts[k], pts[(k + 2) % 5]
        plan.append(Action("draw_line", [p[0], p[1], q[0], q[1]]))
    return plan

def gen_domain(init):
    return {
        "cx": ContinuousSampler(TABLE_BOUNDS[0][0] + 0.1, TABLE_BOUNDS[0][1] - 0.1),
        "cy": ContinuousSampler(TABLE_BOUNDS[1][0] + 0.1, TABLE_BOUNDS[1][1] - 0.1),
        "r": ContinuousSampler(0.05, 0.1),
        "angle": ContinuousSampler(0, 2 * PI / 5),
    }
'''

STAR_CAP = '''
def gen_plan(init):
    cx, cy, r = 0.0, -0.5, 0.1
    pts = []
    for k in range(5):
        a = PI / 2 + k * 2 * PI / 5
        pts.append([cx + r * cos(a), cy + r * sin(a)])
    plan = []
    for k in range(5):
        p, q = pts[k], pts[(k + 2) % 5]
        plan.append(Action("draw_line", [p[0], p[1], q[0], q[1]]))
    return plan
'''


def star_literal(cx, cy, r):
    import math
    pts = [(cx + r * math.cos(math.pi / 2 + k * 2 * math.pi / 5), cy + r * math.sin(math.pi / 2 + k * 2 * math.pi / 5))
           for k in range(5)]
    lines = []
    for k in range(5):
        p, q = pts[k], pts[(k + 2) % 5]
        lines.append(f'    Action("draw_line", [{p[0]:.3f}, {p[1]:.3f}, {q[0]:.3f}, {q[1]:.3f}]),')
    return "gen_plan = [\n" + "\n".join(lines) + "\n]"


ARROW_OPEN = '''
def gen_plan(init, theta, gap, length, head, spread):
    target = init.obstacles[0]
    for o in init.obstacles:
        if o.radius > target.radius:
            target = o
    ux, uy = cos(theta), sin(theta)
    tx = target.x + (target.radius + gap) * ux
    ty = target.y + (target.radius + gap) * uy
    plan = [Action("draw_line", [tx + length * ux, ty + length * uy, tx, ty])]
    for s in [-1, 1]:
        a = theta + s * spread
        plan.append(Action("draw_line", [tx, ty, tx + head * cos(a), ty + head * sin(a)]))
    return plan

def gen_domain(init):
    return {
        "theta": ContinuousSampler(0, 2 * PI),
        "gap": ContinuousSampler(0.01, 0.04),
        "length": ContinuousSampler(0.08, 0.15),
        "head": ContinuousSampler(0.02, 0.04),
        "spread": ContinuousSampler(PI / 9, PI / 3),
    }
'''

# the shaft starts at the obstacle center, so it always runs through the obstacle
ARROW_THROUGH = '''
def gen_plan(init, theta, length):
    target = init.obstacles[0]
    for o in init.obstacles:
        if o.radius > target.radius:
            target = o
    ux, uy = cos(theta), sin(theta)
    sx, sy = target.x, target.y
    tx, ty = sx + length * ux, sy + length * uy
    plan = [Action("draw_line", [sx, sy, tx, ty])]
    for s in [-1, 1]:
        a = theta + PI + s * PI / 6
        plan.append(Action("draw_line", [tx, ty, tx + 0.03 * cos(a), ty + 0.03 * sin(a)]))
    return plan

def gen_domain(init):
    return {
        "theta": ContinuousSampler(0, 2 * PI),
        "length": ContinuousSampler(0.08, 0.15),
    }
'''

ARROW_CAP = '''
def gen_plan(init):
    target = init.obstacles[0]
    for o in init.obstacles:
        if o.radius > target.radius:
            target = o
    tx, ty = target.x, target.y + target.radius + 0.02
    plan = [Action("draw_line", [tx, ty + 0.1, tx, ty])]
    plan.append(Action("draw_line", [tx, ty, tx - 0.02, ty + 0.03]))
    plan.append(Action("draw_line", [tx, ty, tx + 0.02, ty + 0.03]))
    return plan
'''

ENCLOSE_OPEN = '''
def gen_plan(init, pair, extra):
    obs = init.obstacles
    pairs = []
    for i in range(len(obs)):
        for j in range(i + 1, len(obs)):
            pairs.append([obs[i], obs[j]])
    a, b = pairs[pair]
    phi = atan2(b.y - a.y, b.x - a.x)
    rv = (max(a.radius, b.radius) + 0.01 + extra) / cos(PI / 8)
    pts = []
    for k in range(5):
        t = phi + PI / 2 + k * PI / 4
        pts.append([a.x + rv * cos(t), a.y + rv * sin(t)])
    for k in range(5):
        t = phi - PI / 2 + k * PI / 4
        pts.append([b.x + rv * cos(t), b.y + rv * sin(t)])
    plan = []
    for k in range(10):
        p, q = pts[k], pts[(k + 1) % 10]
        plan.append(Action("draw_line", [p[0], p[1], q[0], q[1]]))
    return plan

def gen_domain(init):
    return {
        "pair": DiscreteSampler(list(range(10))),
        "extra": ContinuousSampler(0.0, 0.02),
    }
'''

# a triangle through the two obstacle centers never contains them
ENCLOSE_BAD = '''
def gen_plan(init, size):
    a, b = init.obstacles[0], init.obstacles[1]
    plan = [
        Action("draw_line", [a.x, a.y, b.x, b.y]),
        Action("draw_line", [b.x, b.y, b.x, b.y + size]),
        Action("draw_line", [b.x, b.y + size, a.x, a.y]),
    ]
    return plan

def gen_domain(init):
    return {"size": ContinuousSampler(0.05, 0.1)}
'''

ENCLOSE_CAP = '''
def gen_plan(init):
    a, b = init.obstacles[0], init.obstacles[1]
    mx, my = (a.x + b.x) / 2, (a.y + b.y) / 2
    r = hypot(a.x - b.x, a.y - b.y) / 2 + 0.08
    pts = [[mx - r, my - r], [mx + r, my - r], [mx + r, my + r], [mx - r, my + r]]
    plan = []
    for k in range(4):
        p, q = pts[k], pts[(k + 1) % 4]
        plan.append(Action("draw_line", [p[0], p[1], q[0], q[1]]))
    return plan
'''


def square_literal(cx, cy, h):
    pts = [(cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h)]
    lines = []
    for k in range(4):
        p, q = pts[k], pts[(k + 1) % 4]
        lines.append(f'    Action("draw_line", [{p[0]:.3f}, {p[1]:.3f}, {q[0]:.3f}, {q[1]:.3f}]),')
    return "gen_plan = [\n" + "\n".join(lines) + "\n]"


def arrow_literal(tx, ty):
    return (f'gen_plan = [\n    Action("draw_line", [{tx:.3f}, {ty + 0.1:.3f}, {tx:.3f}, {ty:.3f}]),\n'
            f'    Action("draw_line", [{tx:.3f}, {ty:.3f}, {tx - 0.02:.3f}, {ty + 0.03:.3f}]),\n'
            f'    Action("draw_line", [{tx:.3f}, {ty:.3f}, {tx + 0.02:.3f}, {ty + 0.03:.3f}]),\n]')


# --------------------------------------------------------------------------
# arrange blocks
# --------------------------------------------------------------------------

PYRAMID_GOOD = '''
def gen_plan(init, x, y, gap):
    blocks = []
    for name, obj in init.objects.items():
        if obj.cat == "block":
            blocks.append(obj)
    a, b, c = blocks[0], blocks[1], blocks[2]
    step = BLOCK_SIZE + gap
    plan = []
    plan += [Action("pick", a.point), Action("place", [x, y, BLOCK_SIZE / 2])]
    plan += [Action("pick", b.point), Action("place", [x + step, y, BLOCK_SIZE / 2])]
    plan += [Action("pick", c.point), Action("place", [x + step / 2, y, 1.5 * BLOCK_SIZE])]
    return plan

def gen_domain(init):
    return {
        "x": ContinuousSampler(TABLE_BOUNDS[0][0] + 0.03, TABLE_BOUNDS[0][1] - 0.1),
        "y": ContinuousSampler(TABLE_BOUNDS[1][0] + 0.03, TABLE_BOUNDS[1][1] - 0.03),
        "gap": ContinuousSampler(0.0, 0.015),
    }
'''

PYRAMID_OVERHANG = '''
def gen_plan(init, x, y, over):
    blocks = []
    for name, obj in init.objects.items():
        if obj.cat == "block":
            blocks.append(obj)
    a, b, c = blocks[0], blocks[1], blocks[2]
    plan = []
    plan += [Action("pick", a.point), Action("place", [x, y, BLOCK_SIZE / 2])]
    plan += [Action("pick", b.point), Action("place", [x + BLOCK_SIZE, y, BLOCK_SIZE / 2])]
    plan += [Action("pick", c.point), Action("place", [x + BLOCK_SIZE + over, y, 1.5 * BLOCK_SIZE])]
    return plan

def gen_domain(init):
    return {
        "x": ContinuousSampler(TABLE_BOUNDS[0][0] + 0.03, TABLE_BOUNDS[0][1] - 0.1),
        "y": ContinuousSampler(TABLE_BOUNDS[1][0] + 0.03, TABLE_BOUNDS[1][1] - 0.03),
        "over": ContinuousSampler(0.025, 0.035),
    }
'''

PYRAMID_CAP = '''
def gen_plan(init):
    blocks = []
    for name, obj in init.objects.items():
        if obj.cat == "block":
            blocks.append(obj)
    a, b, c = blocks[0], blocks[1], blocks[2]
    x, y = a.x, a.y
    return [
        Action("pick", b.point), Action("place", [x + BLOCK_SIZE, y, BLOCK_SIZE / 2]),
        Action("pick", c.point), Action("place", [x + BLOCK_SIZE / 2, y, 1.5 * BLOCK_SIZE]),
    ]
'''

LINE_GOOD = '''
def gen_plan(init, x0, y, gap):
    blocks = []
    for name, obj in init.objects.items():
        if obj.cat == "block":
            blocks.append(obj)
    plan = []
    for i in range(5):
        plan.append(Action("pick", blocks[i].point))
        plan.append(Action("place", [x0 + i * (BLOCK_SIZE + gap), y, BLOCK_SIZE / 2]))
    return plan

def gen_domain(init):
    return {
        "x0": ContinuousSampler(TABLE_BOUNDS[0][0] + 0.03, TABLE_BOUNDS[0][1] - 0.25),
        "y": ContinuousSampler(TABLE_BOUNDS[1][0] + 0.03, TABLE_BOUNDS[1][1] - 0.03),
        "gap": ContinuousSampler(0.0, 0.01),
    }
'''

LINE_TIGHT = '''
def gen_plan(init, x0, y):
    blocks = []
    for name, obj in init.objects.items():
        if obj.cat == "block":
            blocks.append(obj)
    plan = []
    for i in range(5):
        plan.append(Action("pick", blocks[i].point))
        plan.append(Action("place", [x0 + i * 0.03, y, BLOCK_SIZE / 2]))
    return plan

def gen_domain(init):
    return {
        "x0": ContinuousSampler(TABLE_BOUNDS[0][0] + 0.03, TABLE_BOUNDS[0][1] - 0.2),
        "y": ContinuousSampler(TABLE_BOUNDS[1][0] + 0.03, TABLE_BOUNDS[1][1] - 0.03),
    }
'''

LINE_CAP = '''
def gen_plan(init):
    blocks = []
    for name, obj in init.objects.items():
        if obj.cat == "block":
            blocks.append(obj)
    plan = []
    for i in range(5):
        plan.append(Action("pick", blocks[i].point))
        plan.append(Action("place", [-0.1 + i * 0.05, -0.5, BLOCK_SIZE / 2]))
    return plan
'''

PACK_GOOD = '''
def gen_plan(init, dx, dy, gap):
    cx, cy = TABLE_CENTER[0] + dx, TABLE_CENTER[1] + dy
    step = BLOCK_SIZE + gap
    spots = [[cx, cy], [cx + step, cy], [cx - step, cy], [cx, cy + step], [cx, cy - step]]
    blocks = []
    for name, obj in init.objects.items():
        if obj.cat == "block":
            blocks.append(obj)
    plan = []
    for i in range(len(blocks)):
        plan.append(Action("pick", blocks[i].point))
        plan.append(Action("place", [spots[i][0], spots[i][1], BLOCK_SIZE / 2]))
    return plan

def gen_domain(init):
    return {
        "dx": ContinuousSampler(-0.005, 0.005),
        "dy": ContinuousSampler(-0.005, 0.005),
        "gap": ContinuousSampler(0.0, 0.01),
    }
'''

PACK_ROW = '''
def gen_plan(init, dy):
    cx, cy = TABLE_CENTER[0], TABLE_CENTER[1] + dy
    blocks = []
    for name, obj in init.objects.items():
        if obj.cat == "block":
            blocks.append(obj)
    plan = []
    for i in range(len(blocks)):
        plan.append(Action("pick", blocks[i].point))
        plan.append(Action("place", [cx + (i - 2) * 0.03, cy, BLOCK_SIZE / 2]))
    return plan

def gen_domain(init):
    return {"dy": ContinuousSampler(-0.01, 0.01)}
'''

PACK_CAP = '''
def gen_plan(init):
    cx, cy = TABLE_CENTER[0], TABLE_CENTER[1]
    spots = [[cx, cy], [cx + 0.04, cy], [cx - 0.04, cy], [cx, cy + 0.04], [cx, cy - 0.04]]
    blocks = []
    for name, obj in init.objects.items():
        if obj.cat == "block":
            blocks.append(obj)
    plan = []
    for i in range(len(blocks)):
        plan.append(Action("pick", blocks[i].point))
        plan.append(Action("place", [spots[i][0], spots[i][1], BLOCK_SIZE / 2]))
    return plan
'''

UNSTACK_DIRECT = '''
def gen_plan(init, dx, dy):
    green, bowl = None, None
    for name, obj in init.objects.items():
        if obj.cat == "block" and obj.color == "green":
            green = obj
        if obj.cat == "bowl":
            bowl = obj
    plan = [Action("pick", green.point)]
    x, y, z = bowl.point
    plan += [Action("place", [x + dx, y + dy, z])]
    return plan

def gen_domain(init):
    return {
        "dx": ContinuousSampler(-0.04, 0.04),
        "dy": ContinuousSampler(-0.04, 0.04),
    }
'''

UNSTACK_GOOD = '''
def gen_plan(init, dx, dy, x_free, y_free):
    green, bowl = None, None
    for name, obj in init.objects.items():
        if obj.cat == "block" and obj.color == "green":
            green = obj
        if obj.cat == "bowl":
            bowl = obj
    plan = []
    for name, obj in init.objects.items():
        if obj.cat == "block" and obj.z > green.z + 0.01:
            if abs(obj.x - green.x) < BLOCK_SIZE and abs(obj.y - green.y) < BLOCK_SIZE:
                plan += [Action("pick", obj.point)]
                plan += [Action("place", [x_free, y_free, BLOCK_SIZE / 2])]
    plan += [Action("pick", green.point)]
    x, y, z = bowl.point
    plan += [Action("place", [x + dx, y + dy, z])]
    return plan

def gen_domain(init):
    return {
        "dx": ContinuousSampler(-0.03, 0.03),
        "dy": ContinuousSampler(-0.03, 0.03),
        "x_free": ContinuousSampler(TABLE_BOUNDS[0][0] + 0.03, TABLE_BOUNDS[0][1] - 0.03),
        "y_free": ContinuousSampler(TABLE_BOUNDS[1][0] + 0.03, TABLE_BOUNDS[1][1] - 0.03),
    }
'''

UNSTACK_CAP = '''
def gen_plan(init):
    green, bowl = None, None
    for name, obj in init.objects.items():
        if obj.cat == "block" and obj.color == "green":
            green = obj
        if obj.cat == "bowl":
            bowl = obj
    x, y, z = bowl.point
    return [Action("pick", green.point), Action("place", [x, y, z])]
'''

# --------------------------------------------------------------------------
# arrange ycb
# --------------------------------------------------------------------------

YCB_PACK_GOOD = '''
def gen_plan(init, g1, g2, g3, rho, angle):
    items = []
    for name, obj in init.objects.items():
        items.append(obj)
    grasps = [g1, g2, g3]
    plan = []
    for i in range(3):
        t = angle + i * 2 * PI / 3
        x = TABLE_CENTER[0] + rho * cos(t)
        y = TABLE_CENTER[1] + rho * sin(t)
        plan.append(Action("pick", [items[i], grasps[i]]))
        plan.append(Action("place", [items[i], grasps[i], ArrangePose(x=x, y=y, z=items[i].z)]))
    return plan

def gen_domain(init):
    return {
        "g1": GraspSampler(),
        "g2": GraspSampler(),
        "g3": GraspSampler(),
        "rho": ContinuousSampler(0.045, 0.058),
        "angle": ContinuousSampler(0, 2 * PI),
    }
'''

YCB_PACK_LINE = '''
def gen_plan(init, g1, g2, g3):
    items = []
    for name, obj in init.objects.items():
        items.append(obj)
    grasps = [g1, g2, g3]
    plan = []
    for i in range(3):
        x = TABLE_CENTER[0] + (i - 1) * 0.05
        plan.append(Action("pick", [items[i], grasps[i]]))
        plan.append(Action("place", [items[i], grasps[i], ArrangePose(x=x, y=TABLE_CENTER[1], z=items[i].z)]))
    return plan

def gen_domain(init):
    return {"g1": GraspSampler(), "g2": GraspSampler(), "g3": GraspSampler()}
'''

YCB_PACK_CAP = '''
def gen_plan(init):
    items = []
    for name, obj in init.objects.items():
        items.append(obj)
    g = ArrangePose(z=-0.005, pitch=PI)
    plan = []
    for i in range(3):
        t = i * 2 * PI / 3
        x = TABLE_CENTER[0] + 0.05 * cos(t)
        y = TABLE_CENTER[1] + 0.05 * sin(t)
        plan.append(Action("pick", [items[i], g]))
        plan.append(Action("place", [items[i], g, ArrangePose(x=x, y=y, z=items[i].z)]))
    return plan
'''

YCB_STACK_GOOD = '''
def gen_plan(init, grasp, dx, dy):
    top, base = None, None
    for name, obj in init.objects.items():
        if obj.cat == "strawberry":
            top = obj
        if obj.cat == "meat_can":
            base = obj
    z = base.z + base.height / 2 + top.height / 2
    return [
        Action("pick", [top, grasp]),
        Action("place", [top, grasp, ArrangePose(x=base.x + dx, y=base.y + dy, z=z)]),
    ]

def gen_domain(init):
    return {
        "grasp": GraspSampler(),
        "dx": ContinuousSampler(-0.01, 0.01),
        "dy": ContinuousSampler(-0.01, 0.01),
    }
'''

YCB_STACK_OFF = '''
def gen_plan(init, grasp, dx):
    top, base = None, None
    for name, obj in init.objects.items():
        if obj.cat == "meat_can":
            top = obj
        if obj.cat == "strawberry":
            base = obj
    z = base.z + base.height / 2 + top.height / 2
    return [
        Action("pick", [top, grasp]),
        Action("place", [top, grasp, ArrangePose(x=base.x + dx, y=base.y, z=z)]),
    ]

def gen_domain(init):
    return {
        "grasp": GraspSampler(),
        "dx": ContinuousSampler(0.03, 0.05),
    }
'''

YCB_STACK_DRILL = '''
def gen_plan(init, grasp):
    top, base = None, None
    for name, obj in init.objects.items():
        if obj.cat == "power_drill":
            top = obj
        if obj.cat == "meat_can":
            base = obj
    z = base.z + base.height / 2 + top.height / 2
    return [
        Action("pick", [top, grasp]),
        Action("place", [top, grasp, ArrangePose(x=base.x, y=base.y, z=z)]),
    ]

def gen_domain(init):
    return {"grasp": GraspSampler()}
'''

YCB_STACK_CAP = '''
def gen_plan(init):
    top, base = None, None
    for name, obj in init.objects.items():
        if obj.cat == "strawberry":
            top = obj
        if obj.cat == "meat_can":
            base = obj
    g = ArrangePose(z=-0.005, pitch=PI)
    z = base.z + base.height / 2 + top.height / 2
    return [
        Action("pick", [top, g]),
        Action("place", [top, g, ArrangePose(x=base.x, y=base.y, z=z)]),
    ]
'''


def blocks_literal(moves):
    lines = []
    for (px, py, pz), (qx, qy, qz) in moves:
        lines.append(f'    Action("pick", [{px}, {py}, {pz}]),')
        lines.append(f'    Action("place", [{qx}, {qy}, {qz}]),')
    return "gen_plan = [\n" + "\n".join(lines) + "\n]"


def ycb_literal(moves):
    lines = []
    for name, (x, y, z) in moves:
        g = "ArrangePose(z=-0.005, pitch=3.14159)"
        lines.append(f'    Action("pick", ["{name}", {g}]),')
        lines.append(f'    Action("place", ["{name}", {g}, ArrangePose(x={x}, y={y}, z={z})]),')
    return "gen_plan = [\n" + "\n".join(lines) + "\n]"


GAUSS_NOTE = "Same program as before."


def fixtures() -> dict:
    fx: dict[str, dict[str, list[str]]] = {}

    # star ---------------------------------------------------------------
    star_llm3 = [code(star_literal(cx, cy, r)) for cx, cy, r in
                 ((0.0, -0.5, 0.1), (0.1, -0.4, 0.08), (-0.12, -0.62, 0.08), (0.12, -0.65, 0.07),
                  (-0.1, -0.35, 0.07), (0.0, -0.7, 0.06))]
    fx["star"] = {
        "proc3s": [code(STAR_FIXED, "A star centered on the table; only the rotation is varied."),
                   code(STAR_OPEN, "The fixed center keeps hitting obstacles, so the center and size are now open.")],
        "proc3s_nf": [code(STAR_OPEN, "Center, size and rotation are open so the star can avoid the obstacles.")],
        "cap": [code(STAR_CAP)],
        "cap_gaussian": [code(STAR_CAP)],
        "llm3": star_llm3,
        "llm3_nf": star_llm3[:1],
        "llm3_gaussian": star_llm3,
    }

    # arrow --------------------------------------------------------------
    arrow_llm3 = [code(arrow_literal(tx, ty)) for tx, ty in
                  ((0.0, -0.45), (0.1, -0.5), (-0.1, -0.55), (0.15, -0.4), (-0.15, -0.6), (0.0, -0.65))]
    fx["arrow"] = {
        "proc3s": [code(ARROW_THROUGH, "The arrow starts next to the largest obstacle and points along theta."),
                   code(ARROW_OPEN, "The tip now sits next to the largest obstacle with the head opening away from it.")],
        "proc3s_nf": [code(ARROW_THROUGH, "The arrow starts next to the largest obstacle and points along theta.")],
        "cap": [code(ARROW_CAP)],
        "cap_gaussian": [code(ARROW_CAP)],
        "llm3": arrow_llm3,
        "llm3_nf": arrow_llm3[:1],
        "llm3_gaussian": arrow_llm3,
    }

    # enclosed -----------------------------------------------------------
    enc_llm3 = [code(square_literal(cx, cy, h)) for cx, cy, h in
                ((0.0, -0.5, 0.2), (0.0, -0.5, 0.25), (0.05, -0.45, 0.15), (-0.05, -0.55, 0.15),
                 (0.1, -0.6, 0.15), (-0.1, -0.4, 0.15))]
    fx["enclosed"] = {
        "proc3s": [code(ENCLOSE_BAD, "A triangle joining the two obstacles."),
                   code(ENCLOSE_OPEN, "A capsule around a pair of obstacles; the pair and the margin are open.")],
        "proc3s_nf": [code(ENCLOSE_OPEN, "A capsule around a pair of obstacles; the pair and the margin are open.")],
        "cap": [code(ENCLOSE_CAP)],
        "cap_gaussian": [code(ENCLOSE_CAP)],
        "llm3": enc_llm3,
        "llm3_nf": enc_llm3[:1],
        "llm3_gaussian": enc_llm3,
    }

    # pyramid ------------------------------------------------------------
    pyr_llm3 = [code(blocks_literal([((0.1, -0.4, 0.02), (0.0, -0.5, 0.02)), ((-0.1, -0.6, 0.02), (0.04, -0.5, 0.02)),
                                     ((0.2, -0.3, 0.02), (0.02, -0.5, 0.06))]))] * 6
    fx["pyramid"] = {
        "proc3s": [code(PYRAMID_OVERHANG, "Two base blocks side by side and a third stacked on the outer one."),
                   code(PYRAMID_GOOD, "The top block fell off its single support; it now spans both base blocks.")],
        "proc3s_nf": [code(PYRAMID_GOOD, "Two touching base blocks and a third centered across them.")],
        "cap": [code(PYRAMID_CAP)],
        "cap_gaussian": [code(PYRAMID_CAP)],
        "llm3": pyr_llm3,
        "llm3_nf": pyr_llm3[:1],
        "llm3_gaussian": pyr_llm3,
    }

    # line ---------------------------------------------------------------
    line_llm3 = [code(blocks_literal([((0.1, -0.4, 0.02), (-0.1 + 0.05 * i, -0.5, 0.02)) for i in range(5)]))] * 6
    fx["line"] = {
        "proc3s": [code(LINE_TIGHT, "Five blocks along x starting at x0."),
                   code(LINE_GOOD, "Blocks overlapped at 0.03 spacing; spacing is now a block width plus a gap.")],
        "proc3s_nf": [code(LINE_GOOD, "Five blocks along x, one block width plus a small gap apart.")],
        "cap": [code(LINE_CAP)],
        "cap_gaussian": [code(LINE_CAP)],
        "llm3": line_llm3,
        "llm3_nf": line_llm3[:1],
        "llm3_gaussian": line_llm3,
    }

    # packing ------------------------------------------------------------
    pack_llm3 = [code(blocks_literal([((0.2, -0.3, 0.02), (0.0, -0.5, 0.02)), ((-0.2, -0.3, 0.02), (0.04, -0.5, 0.02)),
                                      ((0.2, -0.7, 0.02), (-0.04, -0.5, 0.02)), ((-0.2, -0.7, 0.02), (0.0, -0.46, 0.02)),
                                      ((0.0, -0.25, 0.02), (0.0, -0.54, 0.02))]))] * 6
    fx["packing"] = {
        "proc3s": [code(PACK_ROW, "All five blocks in a row through the center."),
                   code(PACK_GOOD, "The row overlapped; a plus shape keeps every block within 0.06.")],
        "proc3s_nf": [code(PACK_GOOD, "A plus shape keeps every block within 0.06 of the center.")],
        "cap": [code(PACK_CAP)],
        "cap_gaussian": [code(PACK_CAP)],
        "llm3": pack_llm3,
        "llm3_nf": pack_llm3[:1],
        "llm3_gaussian": pack_llm3,
    }

    # unstack ------------------------------------------------------------
    uns_llm3 = [code(blocks_literal([((0.0, -0.5, 0.02), (0.1, -0.5, 0.03))]))] * 6
    fx["unstack"] = {
        "proc3s": [code(UNSTACK_DIRECT, "Pick the green block and drop it in the bowl."),
                   code(UNSTACK_GOOD, "A block rests on the green one; move it to a free spot first.")],
        "proc3s_nf": [code(UNSTACK_DIRECT, "Pick the green block and drop it in the bowl.")],
        "cap": [code(UNSTACK_CAP)],
        "cap_gaussian": [code(UNSTACK_CAP)],
        "llm3": uns_llm3,
        "llm3_nf": uns_llm3[:1],
        "llm3_gaussian": uns_llm3,
    }

    # ycb packing -----------------------------------------------------------
    ycbp_llm3 = [code(ycb_literal([("o1", (0.05, -0.5, 0.02)), ("o2", (-0.03, -0.46, 0.0225)),
                                   ("o3", (-0.02, -0.54, 0.04))]))] * 6
    fx["ycb_packing"] = {
        "proc3s": [code(YCB_PACK_LINE, "The three objects side by side through the center."),
                   code(YCB_PACK_GOOD, "They collided in a row; a triangle around the center leaves room.")],
        "proc3s_nf": [code(YCB_PACK_LINE, "The three objects side by side through the center.")],
        "cap": [code(YCB_PACK_CAP)],
        "cap_gaussian": [code(YCB_PACK_CAP)],
        "llm3": ycbp_llm3,
        "llm3_nf": ycbp_llm3[:1],
        "llm3_gaussian": ycbp_llm3,
    }

    # ycb stacking -----------------------------------------------------------
    ycbs_llm3 = [code(ycb_literal([("o4", (0.0, -0.5, 0.1))]))] * 6
    fx["ycb_stacking"] = {
        "proc3s": [code(YCB_STACK_DRILL, "The drill goes on the meat can."),
                   code(YCB_STACK_OFF, "The drill is too wide to grasp; put the meat can on the strawberry instead."),
                   code(YCB_STACK_GOOD, "The can fell off the strawberry; the strawberry goes on the can instead.")],
        "proc3s_nf": [code(YCB_STACK_GOOD, "The strawberry goes on top of the meat can.")],
        "cap": [code(YCB_STACK_CAP)],
        "cap_gaussian": [code(YCB_STACK_CAP)],
        "llm3": ycbs_llm3,
        "llm3_nf": ycbs_llm3[:1],
        "llm3_gaussian": ycbs_llm3,
    }
    return fx


def main():
    for task, by_approach in fixtures().items():
        d = ROOT / task
        d.mkdir(parents=True, exist_ok=True)
        for approach, responses in by_approach.items():
            if approach == "proc3s":
                # a retry of the final program fills the remaining feedback turns
                responses = responses + [responses[-1]] * (6 - len(responses))
            (d / f"{approach}.json").write_text(json.dumps(responses, indent=1) + "\n")


if __name__ == "__main__":
    main()
