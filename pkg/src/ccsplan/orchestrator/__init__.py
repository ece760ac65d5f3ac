from .backends import LlmBackend, ReplayBackend, WireBackend
from .episode import (
    APPROACHES, MAX_FEEDBACK, EpisodeConfig, EpisodeLog, Exchange, Problem, run_approach, run_cap,
    run_llm3, run_proc3s,
)
from .prompts import PromptBundle, build_feedback_prompt, build_initial_prompt, feedback_message, load_bundle

__all__ = [
    "APPROACHES", "MAX_FEEDBACK", "EpisodeConfig", "EpisodeLog", "Exchange", "LlmBackend", "Problem",
    "PromptBundle", "ReplayBackend", "WireBackend", "build_feedback_prompt", "build_initial_prompt",
    "feedback_message", "load_bundle", "run_approach", "run_cap", "run_llm3", "run_proc3s",
]
