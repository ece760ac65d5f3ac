"""AST for plan-sketch programs.

Source locations are carried on every node but excluded from equality, so a
tree printed and re-parsed compares equal to the original.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Union


def _loc():
    return field(default=0, compare=False, repr=False)


# expressions ----------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Union[int, float]
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class Str:
    value: str
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class Const:
    value: Any  # True, False or None
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class Name:
    id: str
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class ListExpr:
    elts: tuple
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class TupleExpr:
    elts: tuple
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class DictExpr:
    keys: tuple
    values: tuple
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Any
    right: Any
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class UnaryOp:
    op: str  # "-", "+", "not"
    operand: Any
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class BoolOp:
    op: str  # "and" | "or"
    values: tuple
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class Compare:
    left: Any
    ops: tuple
    comparators: tuple
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class IfExp:
    test: Any
    body: Any
    orelse: Any
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class Call:
    func: Any
    args: tuple
    keywords: tuple  # ((name, expr), ...)
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class Attribute:
    value: Any
    attr: str
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class Subscript:
    value: Any
    index: Any
    line: int = _loc()
    col: int = _loc()


# assignment targets -------------------------------------------------------

@dataclass(frozen=True)
class TuplePattern:
    elts: tuple
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class ListPattern:
    elts: tuple
    line: int = _loc()
    col: int = _loc()


# statements -----------------------------------------------------------------

@dataclass(frozen=True)
class Assign:
    targets: tuple
    value: Any
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class AugAssign:
    target: Name
    op: str
    value: Any
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class For:
    target: Any
    iter: Any
    body: tuple
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class If:
    test: Any
    body: tuple
    orelse: tuple
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class Return:
    value: Any  # None for a bare return
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class ExprStmt:
    value: Any
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class Pass:
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class FunctionDef:
    name: str
    params: tuple
    body: tuple
    line: int = _loc()
    col: int = _loc()


@dataclass(frozen=True)
class Module:
    body: tuple
    line: int = _loc()
    col: int = _loc()
