"""The plan-sketch language: parser, printer, sandboxed evaluator and samplers."""

from .interp import LOOP_CAP, STEP_BUDGET, ActionValue, Interpreter
from .parser import parse, parse_expr
from .printer import to_source
from .program import (
    LmpProgram, code_blocks, eval_domain, eval_plan, extract_literal_plan, extract_program, to_ground,
)
from .samplers import SamplerSpec, continuous, discrete, grasp, sample

__all__ = [
    "LOOP_CAP", "STEP_BUDGET", "ActionValue", "Interpreter", "LmpProgram", "SamplerSpec",
    "code_blocks", "continuous", "discrete", "eval_domain", "eval_plan", "extract_literal_plan",
    "extract_program", "grasp", "parse", "parse_expr", "sample", "to_ground", "to_source",
]
