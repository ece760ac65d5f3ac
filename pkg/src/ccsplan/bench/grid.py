"""Task x approach x seed grids with resumable newline-delimited JSON output."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

from ..config import DEFAULT, EnvConstants
from ..errors import BackendError
from ..orchestrator import APPROACHES, EpisodeConfig, Problem, ReplayBackend, run_approach
from ..scene import state_to_dict
from ..solver import frozen_clock
from ..tasks import TaskSpec, evaluate_goal, get_task, make_initial_state

log = logging.getLogger(__name__)

RECORDS_FILE = "records.ndjson"


@dataclass
class RunRecord:
    task: str
    approach: str
    seed: int
    success: bool
    samples_used: int
    feedback_queries: int
    wall_total: float
    wall_csp: float
    wall_llm: float
    failure: str = ""
    status: str = ""
    goal_diagnostics: str = ""
    initial_state: dict | None = field(default=None, repr=False)
    final_state: dict | None = field(default=None, repr=False)

    @property
    def key(self) -> tuple[str, str, int]:
        return self.task, self.approach, self.seed

    def to_json(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, d: dict) -> "RunRecord":
        return cls(**d)


def load_records(path: str | Path) -> list[RunRecord]:
    path = Path(path)
    if path.is_dir():
        path = path / RECORDS_FILE
    if not path.exists():
        return []
    out = []
    for line in path.read_text().splitlines():
        if line.strip():
            out.append(RunRecord.from_json(json.loads(line)))
    return out


class FixtureSource:
    """Builds a fresh replay backend per cell from ``<root>/<task>/<approach>.json``."""

    def __init__(self, root: str | Path | None = None):
        if root is None:
            from importlib import resources
            root = Path(str(resources.files("ccsplan") / "data" / "replay"))
        self.root = Path(root)

    def __call__(self, task: str, approach: str) -> ReplayBackend:
        return ReplayBackend.from_file(self.root / task / f"{approach}.json")


class SharedBackend:
    """Hands the same backend (e.g. a wire client) to every cell."""

    def __init__(self, backend):
        self.backend = backend

    def __call__(self, task: str, approach: str):
        return self.backend


def run_cell(spec: TaskSpec, approach: str, backend_factory: Callable, cfg: EpisodeConfig,
             episodes_dir: Path | None = None) -> RunRecord:
    consts = cfg.consts
    s0 = make_initial_state(spec, consts)
    problem = Problem(spec.env, spec.goal, s0, spec.budget)
    base = dict(task=spec.task_id, approach=approach, seed=spec.seed, initial_state=state_to_dict(s0))
    try:
        backend = backend_factory(spec.task_id, approach)
        episode = run_approach(approach, problem, backend, replace(cfg, seed=spec.seed))
    except BackendError as e:
        log.warning("%s/%s/%d: %s", spec.task_id, approach, spec.seed, e)
        return RunRecord(success=False, samples_used=0, feedback_queries=0, wall_total=0.0, wall_csp=0.0,
                         wall_llm=0.0, failure=e.code, status=e.code, goal_diagnostics=e.message, **base)
    if episodes_dir is not None:
        episodes_dir.mkdir(parents=True, exist_ok=True)
        name = f"{spec.task_id}__{approach}__s{spec.seed}.json"
        (episodes_dir / name).write_text(json.dumps(episode.to_json(), indent=1, sort_keys=True) + "\n")
    failure, diagnostics, success = episode.status, "", False
    if episode.success:
        verdict = evaluate_goal(spec, episode.final_state, None, consts)
        success = verdict.success
        failure = "" if success else "goal-failed"
        diagnostics = verdict.diagnostics
    return RunRecord(
        success=success,
        samples_used=episode.samples_used,
        feedback_queries=episode.feedback_queries,
        wall_total=episode.total_seconds,
        wall_csp=episode.csp_seconds,
        wall_llm=episode.llm_seconds,
        failure=failure,
        status=episode.status,
        goal_diagnostics=diagnostics,
        final_state=None if episode.final_state is None else state_to_dict(episode.final_state),
        **base,
    )


def _cell_job(args):
    spec, approach, factory, cfg, episodes_dir = args
    return run_cell(spec, approach, factory, cfg, episodes_dir)


def run_grid(tasks: Sequence[str | TaskSpec], approaches: Sequence[str], seeds: Iterable[int],
             backend_factory: Callable, out_dir: str | Path, workers: int = 1,
             cfg: EpisodeConfig | None = None, consts: EnvConstants = DEFAULT) -> list[RunRecord]:
    """Run every missing cell and append its record; returns the new records.

    Cells already present in ``out_dir/records.ndjson`` are skipped, so an
    interrupted grid can be restarted with the same arguments.
    """
    cfg = cfg or EpisodeConfig(consts=consts, clock=frozen_clock)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for a in approaches:
        if a not in APPROACHES:
            raise ValueError(f"unknown approach {a!r}")
    seeds = list(seeds)
    specs = [t if isinstance(t, TaskSpec) else get_task(t) for t in tasks]
    done = {r.key for r in load_records(out)}
    jobs = []
    for spec in specs:
        for approach in approaches:
            for seed in seeds:
                if (spec.task_id, approach, seed) not in done:
                    jobs.append((spec.with_seed(seed), approach, backend_factory, cfg, out / "episodes"))
    new: list[RunRecord] = []
    if not jobs:
        return new
    # results come back in submission order, so the file order does not depend on scheduling
    with open(out / RECORDS_FILE, "a") as fh:
        if workers <= 1:
            results = map(_cell_job, jobs)
            pool = None
        else:
            pool = ProcessPoolExecutor(max_workers=workers)
            results = pool.map(_cell_job, jobs)
        try:
            for rec in results:
                fh.write(rec.dumps() + "\n")
                fh.flush()
                new.append(rec)
        finally:
            if pool is not None:
                pool.shutdown()
    return new
