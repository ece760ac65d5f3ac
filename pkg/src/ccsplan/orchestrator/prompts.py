"""Prompt assembly from the per-environment template files."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..errors import TemplateError
from ..scene import WorldState, state_to_prompt_text
from ..solver import FeedbackSummary

METHODS = ("proc3s", "cap", "llm3")
ENV_NAMES = ("drawing", "arrange_blocks", "arrange_ycb")


@dataclass(frozen=True)
class PromptBundle:
    system_prompt: str
    domain_setup_code: str
    skill_preface: str
    domain_skills: str
    method_role: str
    domain_example: str

    def assemble(self) -> str:
        parts = (self.system_prompt, self.domain_setup_code, self.skill_preface,
                 self.domain_skills, self.method_role, self.domain_example)
        return "\n\n".join(p.strip("\n") for p in parts) + "\n"


def _template_dir() -> Path:
    return Path(str(resources.files("ccsplan") / "data" / "prompts"))


def _read(root: Path, name: str) -> str:
    path = root / name
    if not path.is_file():
        raise TemplateError(f"missing prompt template {name}")
    return path.read_text()


def load_bundle(env: str, method: str = "proc3s", root: Path | None = None) -> PromptBundle:
    # the two feedback-free ablations share their parent method's prompt
    method = {"proc3s_nf": "proc3s", "cap_gaussian": "cap", "llm3_nf": "llm3",
              "llm3_gaussian": "llm3"}.get(method, method)
    if env not in ENV_NAMES:
        raise TemplateError(f"no prompt templates for environment {env!r}")
    if method not in METHODS:
        raise TemplateError(f"no prompt templates for method {method!r}")
    root = root or _template_dir()
    return PromptBundle(
        system_prompt=_read(root, "system.txt"),
        domain_setup_code=_read(root, f"{env}_setup.txt"),
        skill_preface=_read(root, "skill_preface.txt"),
        domain_skills=_read(root, f"{env}_skills.txt"),
        method_role=_read(root, f"{method}_role.txt"),
        domain_example=_read(root, f"examples/{env}_{method}.txt"),
    )


def build_initial_prompt(env: str, goal: str, s0: WorldState, method: str = "proc3s",
                         root: Path | None = None) -> str:
    bundle = load_bundle(env, method, root)
    return (bundle.assemble()
            + "\n#define user\nState:\n" + state_to_prompt_text(s0) + "\n"
            + f"Goal: {goal}\n")


def feedback_message(fs: FeedbackSummary) -> str:
    lines = "\n".join(fs.lines())
    return ("#define user\nThe plan failed constraint checking. The most common violations were:\n"
            f"{lines}\n"
            "Explain what went wrong and return an updated answer that fixes the issue.\n")


def build_feedback_prompt(prior, fs: FeedbackSummary) -> str:
    """The whole conversation so far followed by the feedback turn.

    ``prior`` is an :class:`~ccsplan.orchestrator.episode.EpisodeLog` (or
    anything with a ``messages`` list of ``{"role", "content"}`` dicts).
    """
    messages = list(getattr(prior, "messages", prior) or [])
    if not messages:
        raise ValueError("feedback needs at least one earlier exchange")
    transcript = "\n".join(m["content"].rstrip("\n") + "\n" for m in messages)
    return transcript + "\n" + feedback_message(fs)
