"""Sandboxed tree-walking evaluator for plan-sketch programs.

Programs see only the initial state (through read-only views), their own
parameters, a few named constants and a fixed table of builtins.  Every node
visit costs one step against a budget, every loop is capped, and integer and
sequence sizes are bounded, so evaluation always terminates quickly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

from ..config import DEFAULT, EnvConstants
from ..errors import ProgramError
from ..scene import Pose, SceneObject, WorldState
from . import nodes as N
from .samplers import SamplerSpec

STEP_BUDGET = 100_000
LOOP_CAP = 1000
_INT_LIMIT = 2 ** 63
_SEQ_LIMIT = 100_000


@dataclass(frozen=True)
class ActionValue:
    name: Any
    params: tuple


class ObjectView:
    """Read-only face of a scene object as programs see it."""

    __slots__ = ("_obj",)

    def __init__(self, obj: SceneObject):
        self._obj = obj

    def __repr__(self):
        return f"Object({self._obj.name})"

    def __eq__(self, other):
        return isinstance(other, ObjectView) and other._obj == self._obj

    def __hash__(self):
        return hash(self._obj.name)

    def get(self, attr: str):
        o = self._obj
        if attr == "name":
            return o.name
        if attr in ("category", "cat"):
            return o.category
        if attr == "color":
            return o.color
        if attr == "pose":
            return o.pose
        if attr == "point":
            return o.pose.point
        if attr in ("x", "x_pos"):
            return o.pose.x
        if attr in ("y", "y_pos"):
            return o.pose.y
        if attr == "z":
            return o.pose.z
        if attr == "radius" and o.shape.kind != "box":
            return o.shape.radius
        if attr == "height":
            return 2 * o.shape.half_height
        if attr == "size" and o.shape.kind == "box":
            return 2 * o.shape.half_extents[0]
        if attr == "body":
            return None
        raise AttributeError(attr)


class LineView:
    __slots__ = ("_seg",)

    def __init__(self, seg):
        self._seg = seg

    def get(self, attr: str):
        (ax, ay), (bx, by) = self._seg
        table = {"p1_x": ax, "p1_y": ay, "p2_x": bx, "p2_y": by}
        if attr in table:
            return table[attr]
        raise AttributeError(attr)


class StateView:
    __slots__ = ("_s",)

    def __init__(self, s: WorldState):
        self._s = s

    def item(self, key):
        if not isinstance(key, str) or key not in self._s:
            raise KeyError(key)
        return ObjectView(self._s[key])

    def get(self, attr: str):
        s = self._s
        if attr == "objects":
            return {name: ObjectView(o) for name, o in s.objects.items()}
        if attr == "obstacles":
            return [ObjectView(o) for o in s.objects.values() if o.category == "obstacle"]
        if attr == "drawn_lines":
            return [LineView(seg) for seg in s.drawn_lines]
        raise AttributeError(attr)


class Namespace:
    """``math`` / ``np`` stand-ins exposing a fixed set of functions."""

    __slots__ = ("name", "members")

    def __init__(self, name: str, members: dict):
        self.name = name
        self.members = members

    def get(self, attr: str):
        try:
            return self.members[attr]
        except KeyError:
            raise AttributeError(attr) from None


class Builtin:
    __slots__ = ("name", "fn")

    def __init__(self, name: str, fn: Callable):
        self.name = name
        self.fn = fn

    def __repr__(self):
        return f"<builtin {self.name}>"


class _Return(Exception):
    def __init__(self, value):
        self.value = value


def _err(msg: str, node, code: str = "runtime-error") -> ProgramError:
    return ProgramError(msg, code, getattr(node, "line", None) or None, getattr(node, "col", None) or None)


def _number(v, what: str = "value"):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError(f"{what} must be a number, got {_type_name(v)}")
    return v


def _type_name(v) -> str:
    if isinstance(v, ObjectView):
        return "Object"
    if isinstance(v, Pose):
        return "Pose"
    if isinstance(v, SamplerSpec):
        return "Sampler"
    if isinstance(v, ActionValue):
        return "Action"
    if isinstance(v, StateView):
        return "State"
    return type(v).__name__


def _check_int(v):
    if isinstance(v, int) and not isinstance(v, bool) and abs(v) > _INT_LIMIT:
        raise OverflowError("integer too large")
    return v


def _check_len(n: int):
    if n > _SEQ_LIMIT:
        raise OverflowError("sequence too long")


# builtins -------------------------------------------------------------------

def _range(*args):
    if not 1 <= len(args) <= 3:
        raise TypeError("range expects 1 to 3 arguments")
    for a in args:
        if isinstance(a, bool) or not isinstance(a, int):
            raise TypeError(f"range bounds must be integers, got {_type_name(a)}")
    r = range(*args)
    if len(r) > LOOP_CAP:
        raise OverflowError(f"range of {len(r)} exceeds the loop cap of {LOOP_CAP}")
    return list(r)


def _len(x):
    if isinstance(x, (list, tuple, dict, str)):
        return len(x)
    raise TypeError(f"object of type {_type_name(x)} has no len()")


def _minmax(fn):
    def run(*args):
        items = args[0] if len(args) == 1 else args
        if not isinstance(items, (list, tuple)):
            raise TypeError(f"{fn.__name__} expects numbers or a list")
        if not items:
            raise ValueError(f"{fn.__name__} of an empty sequence")
        return fn(items)
    return run


def _sum(items, start=0):
    if not isinstance(items, (list, tuple)):
        raise TypeError("sum expects a list")
    total = start
    for v in items:
        total = total + _number(v, "sum item")
    return total


def _sqrt(x):
    x = _number(x)
    if x < 0:
        raise ValueError("sqrt of a negative number")
    return math.sqrt(x)


def _float(x):
    if isinstance(x, str):
        raise TypeError("float() of a string is not allowed")
    return float(_number(x))


def _int(x):
    if isinstance(x, str):
        raise TypeError("int() of a string is not allowed")
    x = _number(x)
    if not math.isfinite(x):
        raise ValueError("int() of a non-finite number")
    return _check_int(int(x))


def _round(x, nd=None):
    x = _number(x)
    return round(x) if nd is None else round(x, int(nd))


def _list(x=()):
    if isinstance(x, dict):
        return list(x.keys())
    if not isinstance(x, (list, tuple)):
        raise TypeError(f"cannot make a list from {_type_name(x)}")
    return list(x)


def _tuple(x=()):
    return tuple(_list(x))


def _enumerate(x, start=0):
    return [(i + start, v) for i, v in enumerate(_list(x))]


def _zip(*xs):
    return [tuple(t) for t in zip(*[_list(x) for x in xs])]


def _sorted(x, reverse=False):
    return sorted(_list(x), reverse=bool(reverse))


def _linspace(a, b, n=50):
    n = int(_number(n))
    if n > LOOP_CAP:
        raise OverflowError("linspace too long")
    a, b = _number(a), _number(b)
    if n == 1:
        return [float(a)]
    return [a + (b - a) * i / (n - 1) for i in range(n)]


def _clip(x, lo, hi):
    return min(max(_number(x), _number(lo)), _number(hi))


def _fn1(f):
    return lambda x: f(_number(x))


_MATH = {
    "pi": math.pi,
    "sin": _fn1(math.sin), "cos": _fn1(math.cos), "tan": _fn1(math.tan),
    "asin": _fn1(math.asin), "acos": _fn1(math.acos), "atan": _fn1(math.atan),
    "atan2": lambda y, x: math.atan2(_number(y), _number(x)),
    "sqrt": _sqrt, "hypot": lambda x, y: math.hypot(_number(x), _number(y)),
    "radians": _fn1(math.radians), "degrees": _fn1(math.degrees),
    "floor": _fn1(math.floor), "ceil": _fn1(math.ceil), "fabs": _fn1(math.fabs),
}


def _make_builtins(runtime: "Interpreter") -> dict[str, Any]:
    b: dict[str, Any] = {}

    def add(name, fn):
        b[name] = Builtin(name, fn)

    add("Action", runtime.make_action)
    for name in ("Continuous", "ContinuousSampler"):
        add(name, runtime.make_continuous)
    for name in ("Discrete", "DiscreteSampler"):
        add(name, runtime.make_discrete)
    for name in ("Grasp", "GraspSampler"):
        add(name, runtime.make_grasp)
    for name in ("Pose", "ArrangePose"):
        add(name, runtime.make_pose)
    add("range", _range)
    add("len", _len)
    add("abs", lambda x: abs(_number(x)))
    add("min", _minmax(min))
    add("max", _minmax(max))
    add("sum", _sum)
    add("round", _round)
    add("float", _float)
    add("int", _int)
    add("list", _list)
    add("tuple", _tuple)
    add("enumerate", _enumerate)
    add("zip", _zip)
    add("sorted", _sorted)
    for name in ("sin", "cos", "tan", "sqrt", "atan2", "hypot", "radians", "degrees"):
        add(name, _MATH[name])
    math_ns = {k: (v if isinstance(v, float) else Builtin(k, v)) for k, v in _MATH.items()}
    np_ns = dict(math_ns)
    np_ns.update({
        "arctan2": Builtin("arctan2", _MATH["atan2"]),
        "abs": Builtin("abs", lambda x: abs(_number(x))),
        "deg2rad": Builtin("deg2rad", _MATH["radians"]),
        "rad2deg": Builtin("rad2deg", _MATH["degrees"]),
        "linspace": Builtin("linspace", _linspace),
        "clip": Builtin("clip", _clip),
        "array": Builtin("array", _list),
    })
    b["math"] = Namespace("math", math_ns)
    b["np"] = Namespace("np", np_ns)
    b["numpy"] = b["np"]
    return b


# evaluator ------------------------------------------------------------------

_ARITH = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": lambda a, b: a / b,
    "//": lambda a, b: a // b,
    "%": lambda a, b: a % b,
}

_CMP = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "in": lambda a, b: a in b,
    "not in": lambda a, b: a not in b,
}


def _arith(op: str, a, b):
    seq = (list, tuple, str)
    if op == "+":
        if isinstance(a, seq) and type(a) is type(b):
            _check_len(len(a) + len(b))
            return a + b
        return _check_int(_number(a, "operand") + _number(b, "operand"))
    if op == "*":
        if isinstance(a, seq) or isinstance(b, seq):
            s, n = (a, b) if isinstance(a, seq) else (b, a)
            if isinstance(n, bool) or not isinstance(n, int):
                raise TypeError("can only repeat a sequence by an integer")
            _check_len(len(s) * max(n, 0))
            return s * n
    if op == "**":
        a, b = _number(a, "operand"), _number(b, "operand")
        if isinstance(a, int) and isinstance(b, int) and b > 64 and abs(a) > 1:
            raise OverflowError("integer power too large")
        r = a ** b
        if isinstance(r, complex):
            raise ValueError("fractional power of a negative number")
        return _check_int(r)
    a, b = _number(a, "operand"), _number(b, "operand")
    return _check_int(_ARITH[op](a, b))


class Interpreter:
    """One evaluation context: a state, constants and a step budget."""

    def __init__(self, state: WorldState | None = None, consts: EnvConstants = DEFAULT,
                 budget: int = STEP_BUDGET):
        self.state = state
        self.consts = consts
        self.budget = budget
        self.steps = 0
        self.builtins = _make_builtins(self)

    # constants are rebuilt per evaluation so a program cannot mutate them for the next
    def constants(self) -> dict[str, Any]:
        c = self.consts
        return {
            "TABLE_BOUNDS": [list(iv) for iv in c.table_bounds],
            "TABLE_CENTER": list(c.table_center),
            "BLOCK_SIZE": c.block_size,
            "PI": math.pi,
            "pi": math.pi,
            "COLORS": list(c.colors),
        }

    # constructors exposed to programs
    def make_action(self, name=None, params=None, *rest):
        if not isinstance(name, str):
            raise TypeError("Action name must be a string")
        if rest:
            params = (params,) + rest
        elif params is None:
            params = ()
        elif not isinstance(params, (list, tuple)):
            params = (params,)
        return ActionValue(name, tuple(params))

    def make_continuous(self, min=0.0, max=1.0):
        return SamplerSpec("continuous", float(_number(min, "min")), float(_number(max, "max")))

    def make_discrete(self, values):
        if isinstance(values, dict):
            values = list(values.keys())
        if not isinstance(values, (list, tuple)):
            raise TypeError("Discrete expects a list of values")
        return SamplerSpec("discrete", values=tuple(values))

    def make_grasp(self):
        return SamplerSpec("grasp")

    def make_pose(self, *args, **kw):
        if len(args) == 1 and isinstance(args[0], (list, tuple)):
            args = tuple(args[0])
        if len(args) > 6:
            raise TypeError("Pose takes at most 6 values")
        names = ("x", "y", "z", "roll", "pitch", "yaw")
        vals = dict(zip(names, args))
        for k, v in kw.items():
            if k not in names:
                raise TypeError(f"Pose has no field {k!r}")
            if k in vals:
                raise TypeError(f"Pose got {k!r} twice")
            vals[k] = v
        return Pose(**{k: _number(v, k) for k, v in vals.items()})

    # entry points ------------------------------------------------------------

    def run_function(self, fn: N.FunctionDef, args: dict[str, Any], prelude=()) -> Any:
        env: dict[str, Any] = {}
        for stmt in prelude:
            self.exec_stmt(stmt, env)
        env.update(args)
        try:
            self.exec_block(fn.body, env)
        except _Return as r:
            return r.value
        return None

    def tick(self, node):
        self.steps += 1
        if self.steps > self.budget:
            raise _err(f"evaluation exceeded {self.budget} steps", node, "budget-exceeded")

    # statements --------------------------------------------------------------

    def exec_block(self, body, env):
        for s in body:
            self.exec_stmt(s, env)

    def exec_stmt(self, s, env):
        self.tick(s)
        t = type(s)
        try:
            if t is N.Assign:
                value = self.eval(s.value, env)
                for target in s.targets:
                    self.bind(target, value, env)
            elif t is N.AugAssign:
                cur = self.lookup(s.target, env)
                self.bind(s.target, _arith(s.op, cur, self.eval(s.value, env)), env)
            elif t is N.ExprStmt:
                self.eval(s.value, env)
            elif t is N.Return:
                raise _Return(None if s.value is None else self.eval(s.value, env))
            elif t is N.For:
                items = self.iterate(self.eval(s.iter, env), s)
                for item in items:
                    self.bind(s.target, item, env)
                    self.exec_block(s.body, env)
            elif t is N.If:
                if self.truth(self.eval(s.test, env)):
                    self.exec_block(s.body, env)
                else:
                    self.exec_block(s.orelse, env)
            elif t is N.Pass:
                pass
            elif t is N.FunctionDef:
                raise _err("unsupported construct: nested function definition", s, "unsupported-construct")
            else:
                raise _err(f"cannot execute {t.__name__}", s)
        except (_Return, ProgramError):
            raise
        except RecursionError:
            raise _err("expression nested too deeply", s) from None
        except (TypeError, ValueError, ZeroDivisionError, OverflowError, KeyError, IndexError,
                AttributeError) as e:
            raise _err(_describe(e), s) from None

    def iterate(self, value, node) -> list:
        if isinstance(value, dict):
            items = list(value.keys())
        elif isinstance(value, (list, tuple, str)):
            items = list(value)
        else:
            raise _err(f"cannot loop over {_type_name(value)}", node)
        if len(items) > LOOP_CAP:
            raise _err(f"loop of {len(items)} iterations exceeds the cap of {LOOP_CAP}", node)
        return items

    def truth(self, v) -> bool:
        if isinstance(v, (bool, int, float, str, list, tuple, dict)) or v is None:
            return bool(v)
        return True

    def bind(self, target, value, env):
        if type(target) is N.Name:
            env[target.id] = value
            return
        if isinstance(value, dict):
            value = list(value.keys())
        if not isinstance(value, (list, tuple)):
            if isinstance(value, Pose):
                value = value.as_list()
            else:
                raise _err(f"cannot unpack {_type_name(value)}", target)
        if len(value) != len(target.elts):
            raise _err(f"expected {len(target.elts)} values to unpack, got {len(value)}", target)
        for t, v in zip(target.elts, value):
            self.bind(t, v, env)

    def lookup(self, node: N.Name, env):
        name = node.id
        if name in env:
            return env[name]
        consts = self.constants()
        if name in consts:
            return consts[name]
        if name in self.builtins:
            return self.builtins[name]
        raise _err(f"name {name!r} is not defined", node)

    # expressions -------------------------------------------------------------

    def eval(self, e, env):
        self.tick(e)
        t = type(e)
        try:
            if t is N.Num or t is N.Str or t is N.Const:
                return e.value
            if t is N.Name:
                return self.lookup(e, env)
            if t is N.BinOp:
                return _arith(e.op, self.eval(e.left, env), self.eval(e.right, env))
            if t is N.UnaryOp:
                v = self.eval(e.operand, env)
                if e.op == "not":
                    return not self.truth(v)
                v = _number(v, "operand")
                return -v if e.op == "-" else +v
            if t is N.Call:
                return self.call(e, env)
            if t is N.Attribute:
                return self.attribute(self.eval(e.value, env), e.attr, e)
            if t is N.Subscript:
                return self.subscript(self.eval(e.value, env), self.eval(e.index, env), e)
            if t is N.ListExpr:
                return [self.eval(x, env) for x in e.elts]
            if t is N.TupleExpr:
                return tuple(self.eval(x, env) for x in e.elts)
            if t is N.DictExpr:
                out = {}
                for k, v in zip(e.keys, e.values):
                    key = self.eval(k, env)
                    if not isinstance(key, (str, int, float, bool, tuple)) and key is not None:
                        raise _err(f"unhashable dict key of type {_type_name(key)}", k)
                    out[key] = self.eval(v, env)
                return out
            if t is N.BoolOp:
                if e.op == "and":
                    v = True
                    for x in e.values:
                        v = self.eval(x, env)
                        if not self.truth(v):
                            return v
                    return v
                v = False
                for x in e.values:
                    v = self.eval(x, env)
                    if self.truth(v):
                        return v
                return v
            if t is N.Compare:
                left = self.eval(e.left, env)
                for op, c in zip(e.ops, e.comparators):
                    right = self.eval(c, env)
                    if op in ("in", "not in") and not isinstance(right, (list, tuple, dict, str)):
                        raise TypeError(f"'in' needs a list, dict or string, got {_type_name(right)}")
                    if not _CMP[op](left, right):
                        return False
                    left = right
                return True
            if t is N.IfExp:
                if self.truth(self.eval(e.test, env)):
                    return self.eval(e.body, env)
                return self.eval(e.orelse, env)
        except ProgramError:
            raise
        except RecursionError:
            raise _err("expression nested too deeply", e) from None
        except (TypeError, ValueError, ZeroDivisionError, OverflowError, KeyError, IndexError,
                AttributeError) as ex:
            raise _err(_describe(ex), e) from None
        raise _err(f"cannot evaluate {t.__name__}", e)

    def attribute(self, obj, attr: str, node):
        if attr.startswith("_"):
            raise _err(f"access to private attribute {attr!r} is not allowed", node, "unsupported-construct")
        if isinstance(obj, (ObjectView, StateView, LineView, Namespace)):
            try:
                return obj.get(attr)
            except AttributeError:
                raise _err(f"{_type_name(obj)} has no attribute {attr!r}", node) from None
        if isinstance(obj, Pose):
            if attr in ("x", "y", "z", "roll", "pitch", "yaw"):
                return getattr(obj, attr)
            if attr == "point":
                return obj.point
            if attr == "euler":
                return obj.euler
            if attr == "pose":
                return obj
        if isinstance(obj, SamplerSpec) and attr in ("min", "max", "values"):
            return getattr(obj, attr)
        if isinstance(obj, ActionValue) and attr in ("name", "params"):
            return getattr(obj, attr)
        raise _err(f"{_type_name(obj)} has no attribute {attr!r}", node)

    def subscript(self, obj, idx, node):
        if isinstance(obj, StateView):
            try:
                return obj.item(idx)
            except KeyError:
                raise _err(f"unknown object {idx!r}", node) from None
        if isinstance(obj, Pose):
            obj = obj.as_list()
        if isinstance(obj, dict):
            if idx not in obj:
                raise _err(f"key {idx!r} not found", node)
            return obj[idx]
        if isinstance(obj, (list, tuple, str)):
            if isinstance(idx, bool) or not isinstance(idx, int):
                raise _err(f"index must be an integer, got {_type_name(idx)}", node)
            if not -len(obj) <= idx < len(obj):
                raise _err(f"index {idx} out of range", node)
            return obj[idx]
        raise _err(f"{_type_name(obj)} is not subscriptable", node)

    def call(self, e: N.Call, env):
        f = e.func
        if type(f) is N.Attribute:
            target = self.eval(f.value, env)
            args = [self.eval(a, env) for a in e.args]
            kwargs = {k: self.eval(v, env) for k, v in e.keywords}
            method = _method(target, f.attr)
            if method is not None:
                return method(*args, **kwargs)
            fn = self.attribute(target, f.attr, f)
        else:
            fn = self.eval(f, env)
            args = [self.eval(a, env) for a in e.args]
            kwargs = {k: self.eval(v, env) for k, v in e.keywords}
        if not isinstance(fn, Builtin):
            raise _err(f"{_type_name(fn)} is not callable", e)
        try:
            return fn.fn(*args, **kwargs)
        except TypeError as ex:
            raise _err(f"{fn.name}(): {_describe(ex)}", e) from None


def _method(target, name: str):
    """Whitelisted methods on runtime values, or None."""
    if isinstance(target, list):
        if name == "append":
            def append(x):
                _check_len(len(target) + 1)
                target.append(x)
            return append
        if name == "extend":
            def extend(xs):
                xs = _list(xs)
                _check_len(len(target) + len(xs))
                target.extend(xs)
            return extend
        if name in ("index", "count"):
            return getattr(target, name)
    if isinstance(target, tuple) and name in ("index", "count"):
        return getattr(target, name)
    if isinstance(target, dict):
        if name == "items":
            return lambda: list(target.items())
        if name == "keys":
            return lambda: list(target.keys())
        if name == "values":
            return lambda: list(target.values())
        if name == "get":
            return lambda k, d=None: target.get(k, d)
    if isinstance(target, str) and name in ("startswith", "endswith", "lower", "upper"):
        return getattr(target, name)
    if isinstance(target, Pose) and name == "multiply":
        def multiply(other):
            if not isinstance(other, Pose):
                raise TypeError("multiply expects a Pose")
            return target.multiply(other)
        return multiply
    return None


def _describe(e: Exception) -> str:
    if isinstance(e, KeyError):
        return f"key {e.args[0]!r} not found"
    if isinstance(e, ZeroDivisionError):
        return "division by zero"
    return str(e) or type(e).__name__
