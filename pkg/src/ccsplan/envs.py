"""The three simulated environments: skill sets, constraint registries, rollout policy."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .scene import ARRANGE_SKILLS, DRAWING_SKILLS, YCB_SKILLS, SkillSchema


@dataclass(frozen=True)
class Environment:
    name: str
    skills: tuple[SkillSchema, ...]
    constraints: tuple[str, ...]
    # Arrange rollouts stop at the first violating step; drawing keeps going
    abort_on_violation: bool
    budget: int
    samplers: tuple[str, ...]


ENVIRONMENTS = {
    "drawing": Environment("drawing", DRAWING_SKILLS, ("kinematic", "collision"), False, 10000,
                           ("Continuous", "Discrete")),
    "arrange_blocks": Environment("arrange_blocks", ARRANGE_SKILLS,
                                  ("kinematic", "collision", "grasp", "placement"), True, 1000,
                                  ("Continuous",)),
    "arrange_ycb": Environment("arrange_ycb", YCB_SKILLS,
                               ("kinematic", "collision", "grasp", "placement"), True, 1000,
                               ("Continuous", "Discrete", "Grasp")),
}


def get_env(name: str) -> Environment:
    try:
        return ENVIRONMENTS[name]
    except KeyError:
        raise KeyError(f"unknown environment {name!r}") from None


def load_registry_config(path: str | Path) -> dict[str, tuple[str, ...]]:
    """Per-environment constraint lists from a JSON file ``{"drawing": ["kinematic", ...]}``."""
    data = json.loads(Path(path).read_text())
    return {env: tuple(ids) for env, ids in data.items()}


def with_constraints(env: Environment, ids) -> Environment:
    from dataclasses import replace
    return replace(env, constraints=tuple(ids))
