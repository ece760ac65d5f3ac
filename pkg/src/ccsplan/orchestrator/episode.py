"""The outer loops: program generation, solving, and feedback.

``run_proc3s`` asks for a plan sketch plus sampler domain, solves it, and on
failure re-prompts with the aggregated violations.  ``run_cap`` asks once for
a fully specified program; ``run_llm3`` asks for a literal list of ground
actions and can re-prompt with the same feedback lines.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Callable

from ..config import DEFAULT, EnvConstants
from ..constraints import program_error_violation
from ..envs import get_env
from ..errors import ProgramError, SolveError
from ..lmp.program import eval_plan, extract_literal_plan, extract_program
from ..scene import WorldState, state_to_dict
from ..solver import (
    FeedbackSummary, SolveConfig, SolveResult, aggregate, check_plan, gaussian_solve, solve,
)
from .prompts import build_initial_prompt, feedback_message

MAX_FEEDBACK = 5


@dataclass(frozen=True)
class Problem:
    env: str
    goal: str
    state: WorldState
    budget: int


@dataclass(frozen=True)
class EpisodeConfig:
    seed: int = 0
    max_feedback: int = MAX_FEEDBACK
    workers: int = 1
    budget: int | None = None
    consts: EnvConstants = DEFAULT
    clock: Callable[[], float] = field(default=time.perf_counter, compare=False, repr=False)

    def solve_config(self, problem: Problem, iteration: int) -> SolveConfig:
        # a fresh stream per iteration keeps iterations independent but reproducible
        return SolveConfig(self.budget or problem.budget, seed=self.seed * 1000 + iteration,
                           workers=self.workers, clock=self.clock)


@dataclass
class Exchange:
    prompt: str
    response: str
    parse_ok: bool
    parse_error: str | None = None
    result: SolveResult | None = None
    feedback: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "prompt": self.prompt,
            "response": self.response,
            "parse": {"ok": self.parse_ok, "error": self.parse_error},
            "result": None if self.result is None else self.result.to_json(),
            "feedback": list(self.feedback),
        }


@dataclass
class EpisodeLog:
    approach: str
    exchanges: list[Exchange] = field(default_factory=list)
    messages: list[dict] = field(default_factory=list)
    status: str = "running"
    plan: list | None = None
    final_state: WorldState | None = None
    llm_seconds: float = 0.0
    csp_seconds: float = 0.0
    total_seconds: float = 0.0

    @property
    def queries(self) -> int:
        return len(self.exchanges)

    @property
    def feedback_queries(self) -> int:
        return max(0, self.queries - 1)

    @property
    def samples_used(self) -> int:
        return sum(e.result.samples_used for e in self.exchanges if e.result is not None)

    @property
    def success(self) -> bool:
        return self.status == "success"

    def to_json(self) -> dict:
        return {
            "approach": self.approach,
            "status": self.status,
            "queries": self.queries,
            "feedback_queries": self.feedback_queries,
            "samples_used": self.samples_used,
            "plan": None if self.plan is None else [a.to_json() for a in self.plan],
            "final_state": None if self.final_state is None else state_to_dict(self.final_state),
            "timing": {"total": self.total_seconds, "csp": self.csp_seconds, "llm": self.llm_seconds},
            "exchanges": [e.to_json() for e in self.exchanges],
        }


class _Timer:
    def __init__(self, clock):
        self.clock = clock

    def __call__(self, fn, *args, **kw):
        t = self.clock()
        out = fn(*args, **kw)
        return out, self.clock() - t


def _query(log: EpisodeLog, backend, prompt: str, timer: _Timer) -> str:
    log.messages.append({"role": "user", "content": prompt})
    response, dt = timer(backend.complete, list(log.messages))
    log.llm_seconds += dt
    log.messages.append({"role": "assistant", "content": response})
    return response


def _program_feedback(e: Exception) -> FeedbackSummary:
    message = e.message if hasattr(e, "message") else str(e)
    return aggregate([program_error_violation(message)])


def _finish(log: EpisodeLog, t0: float, clock) -> EpisodeLog:
    log.total_seconds = clock() - t0
    return log


def run_proc3s(problem: Problem, backend, cfg: EpisodeConfig = EpisodeConfig(), feedback: bool = True,
               approach: str | None = None) -> EpisodeLog:
    env = get_env(problem.env)
    log = EpisodeLog(approach or ("proc3s" if feedback else "proc3s_nf"))
    timer = _Timer(cfg.clock)
    t0 = cfg.clock()
    prompt = build_initial_prompt(problem.env, problem.goal, problem.state, "proc3s")
    rounds = 1 + (cfg.max_feedback if feedback else 0)
    last = "parse-failure"
    for it in range(rounds):
        response = _query(log, backend, prompt, timer)
        ex = Exchange(prompt, response, parse_ok=True)
        log.exchanges.append(ex)
        try:
            program = extract_program(response)
            result, dt = timer(solve, program, problem.state, env, cfg.solve_config(problem, it), cfg.consts)
            log.csp_seconds += dt
        except (ProgramError, SolveError) as e:
            ex.parse_ok = False
            ex.parse_error = f"{e.code}: {e.message}"
            summary = _program_feedback(e)
            last = "parse-failure"
        else:
            ex.result = result
            if result.solved:
                log.status = "success"
                log.plan = result.plan
                log.final_state = result.final_state
                return _finish(log, t0, cfg.clock)
            summary = result.summary
            last = "csp-timeout"
        ex.feedback = summary.lines()
        prompt = feedback_message(summary)
    log.status = "iteration-cap" if feedback and rounds > 1 else last
    return _finish(log, t0, cfg.clock)


def run_cap(problem: Problem, backend, gaussian: bool = False, cfg: EpisodeConfig = EpisodeConfig()) -> EpisodeLog:
    env = get_env(problem.env)
    log = EpisodeLog("cap_gaussian" if gaussian else "cap")
    timer = _Timer(cfg.clock)
    t0 = cfg.clock()
    prompt = build_initial_prompt(problem.env, problem.goal, problem.state, "cap")
    response = _query(log, backend, prompt, timer)
    ex = Exchange(prompt, response, parse_ok=True)
    log.exchanges.append(ex)
    try:
        program = extract_program(response, require_domain=False)
        if program.params:
            raise ProgramError("gen_plan must take only the state as input", "arity-mismatch")
        plan = eval_plan(program, problem.state, {}, env.skills, cfg.consts)
    except ProgramError as e:
        ex.parse_ok = False
        ex.parse_error = f"{e.code}: {e.message}"
        log.status = "parse-failure"
        return _finish(log, t0, cfg.clock)
    result = _check(plan, problem, env, cfg, gaussian, timer, log, 0)
    ex.result = result
    _settle_status(log, result, gaussian)
    return _finish(log, t0, cfg.clock)


def _check(plan, problem, env, cfg, gaussian, timer, log, it) -> SolveResult:
    if gaussian:
        result, dt = timer(gaussian_solve, plan, problem.state, env, cfg.solve_config(problem, it), cfg.consts)
    else:
        result, dt = timer(check_plan, plan, problem.state, env, cfg.consts)
        result.wall_clock = dt
    log.csp_seconds += dt
    return result


def _settle_status(log: EpisodeLog, result: SolveResult, gaussian: bool):
    if result.solved:
        log.status = "success"
        log.plan = result.plan
        log.final_state = result.final_state
    else:
        log.status = "csp-timeout" if gaussian else "constraint-violation"


def run_llm3(problem: Problem, backend, feedback: bool = True, gaussian: bool = False,
             cfg: EpisodeConfig = EpisodeConfig()) -> EpisodeLog:
    env = get_env(problem.env)
    name = "llm3_gaussian" if gaussian else ("llm3" if feedback else "llm3_nf")
    log = EpisodeLog(name)
    timer = _Timer(cfg.clock)
    t0 = cfg.clock()
    prompt = build_initial_prompt(problem.env, problem.goal, problem.state, "llm3")
    rounds = 1 + (cfg.max_feedback if feedback else 0)
    last = "parse-failure"
    for it in range(rounds):
        response = _query(log, backend, prompt, timer)
        ex = Exchange(prompt, response, parse_ok=True)
        log.exchanges.append(ex)
        try:
            plan = extract_literal_plan(response, env.skills, problem.state)
        except ProgramError as e:
            ex.parse_ok = False
            ex.parse_error = f"{e.code}: {e.message}"
            summary = _program_feedback(e)
            last = "parse-failure"
        else:
            result = _check(plan, problem, env, cfg, gaussian, timer, log, it)
            ex.result = result
            if result.solved:
                _settle_status(log, result, gaussian)
                return _finish(log, t0, cfg.clock)
            summary = result.summary
            last = "csp-timeout" if gaussian else "constraint-violation"
        ex.feedback = summary.lines()
        prompt = feedback_message(summary)
    log.status = "iteration-cap" if feedback and rounds > 1 else last
    return _finish(log, t0, cfg.clock)


APPROACHES = ("proc3s", "proc3s_nf", "cap", "cap_gaussian", "llm3", "llm3_nf", "llm3_gaussian")


def run_approach(approach: str, problem: Problem, backend, cfg: EpisodeConfig = EpisodeConfig()) -> EpisodeLog:
    if approach == "proc3s":
        return run_proc3s(problem, backend, cfg, feedback=True)
    if approach == "proc3s_nf":
        return run_proc3s(problem, backend, cfg, feedback=False)
    if approach == "cap":
        return run_cap(problem, backend, False, cfg)
    if approach == "cap_gaussian":
        return run_cap(problem, backend, True, cfg)
    if approach == "llm3":
        return run_llm3(problem, backend, True, False, cfg)
    if approach == "llm3_nf":
        return run_llm3(problem, backend, False, False, cfg)
    if approach == "llm3_gaussian":
        return run_llm3(problem, backend, True, True, cfg)
    raise ValueError(f"unknown approach {approach!r}")
