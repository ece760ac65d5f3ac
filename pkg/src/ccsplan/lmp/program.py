"""Turning LLM responses into programs, and programs into plans."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from ..config import DEFAULT, EnvConstants
from ..errors import ActionError, ProgramError
from ..scene import GroundAction, Pose, SkillSchema, WorldState, validate_action
from . import nodes as N
from .interp import ActionValue, Interpreter, ObjectView, StateView
from .parser import parse
from .printer import to_source
from .samplers import SamplerSpec

_FENCE = re.compile(r"```[^\n`]*\n(.*?)```", re.S)

Domain = dict  # ordered name -> SamplerSpec
ParamVector = dict  # ordered name -> value


@dataclass(frozen=True)
class LmpProgram:
    plan_fn: N.FunctionDef
    domain_fn: N.FunctionDef | None
    source: str
    # top-level assignments, evaluated before either function runs
    prelude: tuple = ()

    @property
    def params(self) -> tuple[str, ...]:
        return self.plan_fn.params[1:]

    def to_source(self) -> str:
        body = list(self.prelude) + [self.plan_fn] + ([self.domain_fn] if self.domain_fn else [])
        return to_source(N.Module(tuple(body)))


def code_blocks(text: str) -> list[str]:
    """Fenced blocks in order; unfenced text that looks like code counts as one block."""
    blocks = _FENCE.findall(text)
    if blocks:
        return blocks
    m = re.search(r"^(def |gen_plan\s*=)", text, re.M)
    return [text[m.start():]] if m else []


def _collect(blocks: Sequence[str]):
    defs: dict[str, N.FunctionDef] = {}
    prelude: list = []
    sources: list[str] = []
    for src in blocks:
        try:
            module = parse(src)
        except ProgramError:
            # a prose or output block that happens to be fenced; only fail on ones that define functions
            if re.search(r"^\s*def\s+gen_", src, re.M):
                raise
            continue
        sources.append(src)
        for stmt in module.body:
            if isinstance(stmt, N.FunctionDef):
                if stmt.name in defs:
                    raise ProgramError(f"function {stmt.name!r} is defined more than once",
                                       "duplicate-definition", stmt.line, stmt.col)
                defs[stmt.name] = stmt
            elif isinstance(stmt, N.Assign):
                prelude.append(stmt)
            elif isinstance(stmt, N.ExprStmt) and isinstance(stmt.value, N.Str):
                continue
            elif isinstance(stmt, N.ExprStmt):
                # example calls such as `gen_plan(init, 0.1)` in the response are ignored
                continue
            else:
                raise ProgramError("unsupported construct: top-level control flow",
                                   "unsupported-construct", stmt.line, stmt.col)
    return defs, prelude, sources


def extract_program(response: str, require_domain: bool = True) -> LmpProgram:
    blocks = code_blocks(response)
    defs, prelude, sources = _collect(blocks)
    plan = defs.get("gen_plan")
    if plan is None:
        raise ProgramError("no function named gen_plan in the response", "missing-function")
    if not plan.params:
        raise ProgramError("gen_plan must take the initial state as its first parameter",
                           "arity-mismatch", plan.line, plan.col)
    domain = defs.get("gen_domain")
    if require_domain and domain is None:
        raise ProgramError("no function named gen_domain in the response", "missing-function")
    if domain is not None and len(domain.params) != 1:
        raise ProgramError("gen_domain must take exactly one parameter, the initial state",
                           "arity-mismatch", domain.line, domain.col)
    extra = sorted(set(defs) - {"gen_plan", "gen_domain"})
    if extra:
        f = defs[extra[0]]
        raise ProgramError(f"unsupported construct: helper function {f.name!r}",
                           "unsupported-construct", f.line, f.col)
    return LmpProgram(plan, domain, "\n".join(sources), tuple(prelude))


def eval_domain(p: LmpProgram, s0: WorldState, consts: EnvConstants = DEFAULT) -> Domain:
    params = p.params
    if p.domain_fn is None:
        if params:
            raise ProgramError("gen_plan has open parameters but there is no gen_domain", "arity-mismatch")
        return {}
    it = Interpreter(s0, consts)
    result = it.run_function(p.domain_fn, {p.domain_fn.params[0]: StateView(s0)}, p.prelude)
    if not isinstance(result, dict):
        raise ProgramError("gen_domain must return a dict of samplers", "runtime-error")
    missing = [k for k in params if k not in result]
    extra = [k for k in result if k not in params]
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"missing samplers for {', '.join(map(str, missing))}")
        if extra:
            parts.append(f"samplers for unknown inputs {', '.join(map(str, extra))}")
        raise ProgramError("gen_domain does not match gen_plan: " + "; ".join(parts), "arity-mismatch")
    domain = {}
    for k in params:
        spec = result[k]
        if not isinstance(spec, SamplerSpec):
            raise ProgramError(f"domain entry {k!r} is not a sampler", "runtime-error")
        domain[k] = spec
    return domain


def _as_pose(v):
    if isinstance(v, Pose):
        return v
    if isinstance(v, (list, tuple)) and len(v) in (3, 6) and \
            all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        try:
            return Pose.from_seq([float(x) for x in v])
        except ValueError:
            return v
    return v


def _convert(value, kind: str):
    if kind == "scalar":
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        return value
    if kind == "object-ref":
        if isinstance(value, ObjectView):
            return value.get("name")
        return value
    return _as_pose(value)


def to_ground(av: ActionValue, schemas: Sequence[SkillSchema], s0: WorldState | None = None) -> GroundAction:
    """Coerce a program's Action value to a validated GroundAction."""
    params = list(av.params)
    schema = next((s for s in schemas if s.name == av.name), None)
    if schema is not None:
        if len(params) == 1 and len(schema.param_spec) > 1 and isinstance(params[0], (list, tuple)):
            params = list(params[0])
        if len(params) == len(schema.param_spec):
            params = [_convert(v, kind) for v, (_, kind) in zip(params, schema.param_spec)]
    a = GroundAction(av.name if isinstance(av.name, str) else repr(av.name), tuple(params))
    try:
        validate_action(a, schemas)
    except ActionError as e:
        raise ProgramError(f"invalid action {a.name}: {e.message}", "invalid-action") from None
    if s0 is not None:
        for v, (_, kind) in zip(a.params, schema.param_spec):
            if kind == "object-ref" and v not in s0:
                raise ProgramError(f"invalid action {a.name}: unknown object {v!r}", "invalid-action")
    return a


def eval_plan(p: LmpProgram, s0: WorldState, v: Mapping[str, Any], schemas: Sequence[SkillSchema],
              consts: EnvConstants = DEFAULT) -> list[GroundAction]:
    params = p.params
    if list(v.keys()) != list(params) and set(v.keys()) != set(params):
        raise ProgramError(f"parameter vector {sorted(v)} does not match gen_plan inputs {list(params)}",
                           "arity-mismatch")
    it = Interpreter(s0, consts)
    args = {p.plan_fn.params[0]: StateView(s0)}
    args.update(v)
    result = it.run_function(p.plan_fn, args, p.prelude)
    return plan_from_value(result, schemas, s0)


def plan_from_value(result, schemas, s0=None) -> list[GroundAction]:
    if not isinstance(result, (list, tuple)):
        raise ProgramError("gen_plan must return a list of Action", "runtime-error")
    out = []
    for item in result:
        if not isinstance(item, ActionValue):
            raise ProgramError(f"gen_plan returned a non-Action item {item!r}", "invalid-action")
        out.append(to_ground(item, schemas, s0))
    return out


# literal plans ----------------------------------------------------------------

_LITERAL_CALLS = {"Action", "Pose", "ArrangePose"}


def _literal_check(e):
    """Reject anything but literals, lists/tuples, negation and Action/Pose calls."""
    if isinstance(e, (N.Num, N.Str, N.Const)):
        return
    if isinstance(e, N.UnaryOp) and e.op in ("-", "+") and isinstance(e.operand, N.Num):
        return
    if isinstance(e, (N.ListExpr, N.TupleExpr)):
        for x in e.elts:
            _literal_check(x)
        return
    if isinstance(e, N.Call) and isinstance(e.func, N.Name) and e.func.id in _LITERAL_CALLS:
        for x in e.args:
            _literal_check(x)
        for _, x in e.keywords:
            _literal_check(x)
        return
    what = type(e).__name__
    if isinstance(e, N.Name):
        what = f"name {e.id!r}"
    elif isinstance(e, N.BinOp):
        what = f"operator {e.op}"
    raise ProgramError(f"plan must be a literal list of actions, found {what}", "literal-parse-error",
                       e.line or None, e.col or None)


def extract_literal_plan(response: str, schemas: Sequence[SkillSchema],
                         s0: WorldState | None = None) -> list[GroundAction]:
    """A ground plan written directly as ``gen_plan = [Action(...), ...]``."""
    value = None
    for src in code_blocks(response):
        try:
            module = parse(src)
        except ProgramError as e:
            if "gen_plan" in src:
                raise ProgramError(f"could not parse plan: {e.message}", "literal-parse-error") from None
            continue
        for stmt in module.body:
            if isinstance(stmt, N.Assign) and any(isinstance(t, N.Name) and t.id == "gen_plan"
                                                  for t in stmt.targets):
                if value is not None:
                    raise ProgramError("gen_plan is assigned more than once", "duplicate-definition",
                                       stmt.line, stmt.col)
                value = stmt.value
    if value is None:
        raise ProgramError("no variable named gen_plan in the response", "missing-function")
    _literal_check(value)
    result = Interpreter(s0).eval(value, {})
    return plan_from_value(result, schemas, s0)

