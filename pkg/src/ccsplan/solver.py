"""Generate-and-test constraint satisfaction over a program's open parameters.

``solve`` draws parameter vectors from the program's domain, evaluates the
plan sketch, rolls the plan out in the simulator and checks every constraint.
The first clean plan wins.  If the budget runs out, the violations seen along
the way are aggregated into a short summary for the LLM.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .config import DEFAULT, EnvConstants
from .constraints import Violation, make_registry, program_error_violation, run_all
from .envs import Environment
from .errors import ProgramError, SimError, SolveError
from .lmp.program import LmpProgram, eval_domain, eval_plan
from .lmp.samplers import SamplerSpec, sample
from .scene import GroundAction, Pose, WorldState, validate_action
from .sim import MotionTrace, execute

TOP_K = 2


@dataclass(frozen=True)
class SolveConfig:
    budget: int
    seed: int = 0
    workers: int = 1
    abort_on_program_error: bool = False
    clock: Callable[[], float] = field(default=time.perf_counter, compare=False, repr=False)

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


def frozen_clock() -> float:
    return 0.0


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(stream)]))


# feedback aggregation ---------------------------------------------------------

@dataclass(frozen=True)
class FeedbackEntry:
    description: str
    count: int
    action_name: str
    step_index: int
    constraint: str

    def line(self) -> str:
        return f"Step {self.step_index}, Action {self.action_name}, Violation:{self.description}."

    def to_json(self) -> dict:
        return {"description": self.description, "count": self.count, "action_name": self.action_name,
                "step_index": self.step_index, "constraint": self.constraint}


@dataclass(frozen=True)
class FeedbackSummary:
    entries: tuple[FeedbackEntry, ...]
    total: int

    def lines(self) -> list[str]:
        return [e.line() for e in self.entries]

    def to_json(self) -> dict:
        return {"entries": [e.to_json() for e in self.entries], "total": self.total}

    @classmethod
    def from_json(cls, d) -> "FeedbackSummary":
        return cls(tuple(FeedbackEntry(**e) for e in d["entries"]), d["total"])


def _mode(c: Counter):
    # most common, ties to the smallest key
    best = max(c.values())
    return min(k for k, n in c.items() if n == best)


class Histogram:
    """Running violation counts keyed by description."""

    def __init__(self):
        self.counts: Counter = Counter()
        self.actions: dict[str, Counter] = {}
        self.steps: dict[str, Counter] = {}
        self.kinds: dict[str, str] = {}

    def add(self, v: Violation, times: int = 1):
        d = v.description
        self.counts[d] += times
        self.actions.setdefault(d, Counter())[v.action_name] += times
        self.steps.setdefault(d, Counter())[v.step_index] += times
        self.kinds.setdefault(d, v.constraint)

    def merge(self, other: "Histogram"):
        for d, n in other.counts.items():
            self.counts[d] += n
            self.actions.setdefault(d, Counter()).update(other.actions[d])
            self.steps.setdefault(d, Counter()).update(other.steps[d])
            self.kinds.setdefault(d, other.kinds[d])

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def summary(self, k: int = TOP_K) -> FeedbackSummary:
        if not self.counts:
            raise SolveError("no violations to aggregate", "empty-input")
        ranked = sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
        entries = tuple(
            FeedbackEntry(d, n, _mode(self.actions[d]), _mode(self.steps[d]), self.kinds[d])
            for d, n in ranked
        )
        return FeedbackSummary(entries, self.total)

    def to_json(self) -> dict:
        return {d: self.counts[d] for d in sorted(self.counts)}


def aggregate(violations: Iterable[Violation], k: int = TOP_K) -> FeedbackSummary:
    h = Histogram()
    for v in violations:
        h.add(v)
    return h.summary(k)


# rollout ------------------------------------------------------------------------

def rollout(plan: Sequence[GroundAction], s0: WorldState, env: Environment,
            consts: EnvConstants = DEFAULT) -> tuple[list[MotionTrace], list[Violation]]:
    """Execute ``plan`` step by step and collect violations tagged with plan indices."""
    registry = make_registry(env.constraints)
    traces: list[MotionTrace] = []
    violations: list[Violation] = []
    s = s0
    for i, a in enumerate(plan):
        validate_action(a, env.skills)
        try:
            trace = execute(s, a, consts)
        except SimError as e:
            # a precondition failure (placing with an empty hand) reads as a grasp failure
            violations.append(Violation("grasp", e.message, i, a.name))
            break
        trace = replace(trace, index=i)
        traces.append(trace)
        found = run_all(trace, registry, consts)
        violations.extend(found)
        s = trace.final
        if found and env.abort_on_violation:
            break
    return traces, violations


def final_state(traces: Sequence[MotionTrace], s0: WorldState) -> WorldState:
    return traces[-1].final if traces else s0


# results --------------------------------------------------------------------------

def _value_json(v):
    if isinstance(v, Pose):
        return {"pose": v.as_list()}
    return v


@dataclass
class SolveResult:
    status: str  # "solved" | "exhausted"
    samples_used: int
    plan: list[GroundAction] | None = None
    params: dict[str, Any] | None = None
    summary: FeedbackSummary | None = None
    histogram: dict[str, int] = field(default_factory=dict)
    wall_clock: float = 0.0
    final_state: WorldState | None = field(default=None, repr=False)

    @property
    def solved(self) -> bool:
        return self.status == "solved"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "samples_used": self.samples_used,
            "plan": None if self.plan is None else [a.to_json() for a in self.plan],
            "params": None if self.params is None else {k: _value_json(v) for k, v in self.params.items()},
            "summary": None if self.summary is None else self.summary.to_json(),
            "histogram": dict(self.histogram),
            "wall_clock": self.wall_clock,
        }

    @classmethod
    def from_json(cls, d) -> "SolveResult":
        plan = None if d["plan"] is None else [GroundAction.from_json(a) for a in d["plan"]]
        params = None
        if d["params"] is not None:
            params = {k: Pose.from_seq(v["pose"]) if isinstance(v, dict) else v for k, v in d["params"].items()}
        summary = None if d["summary"] is None else FeedbackSummary.from_json(d["summary"])
        return cls(d["status"], d["samples_used"], plan, params, summary, dict(d["histogram"]), d["wall_clock"])


# sampling loop ----------------------------------------------------------------------

def _draw(domain: dict[str, SamplerSpec], rng) -> dict[str, Any]:
    return {k: sample(spec, rng) for k, spec in domain.items()}


def _key(v: dict) -> tuple:
    return tuple((k, repr(x)) for k, x in v.items())


def _try(program, s0, env, consts, v, abort_on_program_error):
    """One sample: returns (plan, violations, final state)."""
    try:
        plan = eval_plan(program, s0, v, env.skills, consts)
    except ProgramError as e:
        if abort_on_program_error:
            raise
        return None, [program_error_violation(e.message)], None
    traces, violations = rollout(plan, s0, env, consts)
    return plan, violations, final_state(traces, s0)


def _run_chunk(program, s0, env, consts, domain, seed, stream, n, abort_on_program_error):
    """Draw up to n samples on one rng stream; stop at the first clean plan."""
    rng = make_rng(seed, stream)
    hist = Histogram()
    memo: dict = {}
    finite = all(spec.kind == "discrete" for spec in domain.values())
    for i in range(n):
        v = _draw(domain, rng)
        key = _key(v) if finite else None
        if key is not None and key in memo:
            plan, violations, final = memo[key]
        else:
            plan, violations, final = _try(program, s0, env, consts, v, abort_on_program_error)
            if key is not None:
                memo[key] = (plan, violations, final)
        if not violations:
            return i + 1, (plan, v, final), hist
        for viol in violations:
            hist.add(viol)
    return n, None, hist


def solve(program: LmpProgram, s0: WorldState, env: Environment, cfg: SolveConfig,
          consts: EnvConstants = DEFAULT) -> SolveResult:
    t0 = cfg.clock()
    try:
        domain = eval_domain(program, s0, consts)
    except ProgramError as e:
        if e.code == "arity-mismatch":
            raise SolveError(e.message, "domain-arity") from None
        raise
    if cfg.workers == 1:
        used, found, hist = _run_chunk(program, s0, env, consts, domain, cfg.seed, 0, cfg.budget,
                                       cfg.abort_on_program_error)
    else:
        used, found, hist = _solve_parallel(program, s0, env, consts, domain, cfg)
    elapsed = cfg.clock() - t0
    if found is not None:
        plan, v, final = found
        return SolveResult("solved", used, plan, v, None, hist.to_json(), elapsed, final)
    return SolveResult("exhausted", used, None, None, hist.summary(), hist.to_json(), elapsed)


def _solve_parallel(program, s0, env, consts, domain, cfg: SolveConfig):
    """Rounds of equal chunks across worker processes; the lowest worker with a success wins."""
    total = 0
    hist = Histogram()
    chunk = max(1, min(250, math.ceil(cfg.budget / cfg.workers)))
    rnd = 0
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        while total < cfg.budget:
            sizes = []
            left = cfg.budget - total
            for _ in range(cfg.workers):
                n = min(chunk, left)
                if n <= 0:
                    break
                sizes.append(n)
                left -= n
            futures = [
                pool.submit(_run_chunk, program, s0, env, consts, domain, cfg.seed,
                            rnd * cfg.workers + w + 1, n, cfg.abort_on_program_error)
                for w, n in enumerate(sizes)
            ]
            results = [f.result() for f in futures]
            winner = None
            for used, found, h in results:
                total += used
                hist.merge(h)
                if found is not None and winner is None:
                    winner = found
            if winner is not None:
                return total, winner, hist
            rnd += 1
    return total, None, hist


# gaussian perturbation ------------------------------------------------------------

def sigma_schedule(i: int, budget: int) -> float:
    """Noise level for sample i: 0 at the first sample, rising linearly to exactly 1 at the last."""
    if budget <= 1:
        return 0.0
    return i / (budget - 1)


def perturb(plan: Sequence[GroundAction], sigma: float, rng: np.random.Generator) -> list[GroundAction]:
    out = []
    for a in plan:
        params = []
        for p in a.params:
            if isinstance(p, (int, float)) and not isinstance(p, bool):
                params.append(float(p) + float(rng.normal(0.0, sigma)) if sigma > 0 else float(p))
            else:
                params.append(p)
        out.append(GroundAction(a.name, tuple(params)))
    return out


def gaussian_solve(plan: Sequence[GroundAction], s0: WorldState, env: Environment, cfg: SolveConfig,
                   consts: EnvConstants = DEFAULT) -> SolveResult:
    t0 = cfg.clock()
    rng = make_rng(cfg.seed, 0)
    hist = Histogram()
    for i in range(cfg.budget):
        candidate = perturb(plan, sigma_schedule(i, cfg.budget), rng)
        traces, violations = rollout(candidate, s0, env, consts)
        if not violations:
            return SolveResult("solved", i + 1, candidate, {"sigma": sigma_schedule(i, cfg.budget)}, None,
                               hist.to_json(), cfg.clock() - t0, final_state(traces, s0))
        for v in violations:
            hist.add(v)
    return SolveResult("exhausted", cfg.budget, None, None, hist.summary(), hist.to_json(), cfg.clock() - t0)


def check_plan(plan: Sequence[GroundAction], s0: WorldState, env: Environment,
               consts: EnvConstants = DEFAULT) -> SolveResult:
    """Single rollout of a fixed plan, reported in the same shape as a solve."""
    traces, violations = rollout(plan, s0, env, consts)
    if not violations:
        return SolveResult("solved", 1, list(plan), {}, None, {}, 0.0, final_state(traces, s0))
    return SolveResult("exhausted", 1, None, None, aggregate(violations), aggregate_hist(violations), 0.0)


def aggregate_hist(violations: Iterable[Violation]) -> dict[str, int]:
    h = Histogram()
    for v in violations:
        h.add(v)
    return h.to_json()
