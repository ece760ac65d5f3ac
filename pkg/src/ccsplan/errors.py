"""Exception hierarchy.  Every error carries a short machine-readable ``code``."""

from __future__ import annotations


class CcsplanError(Exception):
    code = "error"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code

    @property
    def message(self) -> str:
        return self.args[0]


class ActionError(CcsplanError):
    """unknown-skill, arity-mismatch, kind-mismatch"""


class SimError(CcsplanError):
    """already-holding, not-holding, unknown-object, grasp-mismatch"""


class ProgramError(CcsplanError):
    """Anything wrong with an LMP: parse-error, unsupported-construct,
    missing-function, duplicate-definition, runtime-error, budget-exceeded,
    arity-mismatch, invalid-action, literal-parse-error."""

    def __init__(self, message: str, code: str = "runtime-error", line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} (line {line}, column {col})"
        super().__init__(message, code)


class SolveError(CcsplanError):
    """domain-arity, empty-input"""


class TaskError(CcsplanError):
    """placement-failure, unknown-checker, duplicate-id, unknown-task"""


class BackendError(CcsplanError):
    code = "backend-error"


class FixtureExhausted(BackendError):
    code = "fixture-exhausted"


class TemplateError(CcsplanError):
    code = "missing-template"
