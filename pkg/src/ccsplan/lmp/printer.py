"""Canonical source printer.  ``parse(to_source(tree)) == tree`` for every tree the parser builds."""

from __future__ import annotations

from . import nodes as N

INDENT = "    "

# binding strength, loosest first; used to decide where parentheses are needed
_PREC = {"ifexp": 1, "or": 2, "and": 3, "not": 4, "cmp": 5, "+": 6, "-": 6,
         "*": 7, "/": 7, "//": 7, "%": 7, "unary": 8, "**": 9, "atom": 10}


def _prec(e) -> int:
    if isinstance(e, N.IfExp):
        return _PREC["ifexp"]
    if isinstance(e, N.BoolOp):
        return _PREC[e.op]
    if isinstance(e, N.UnaryOp):
        return _PREC["not"] if e.op == "not" else _PREC["unary"]
    if isinstance(e, N.Compare):
        return _PREC["cmp"]
    if isinstance(e, N.BinOp):
        return _PREC[e.op]
    if isinstance(e, N.Num) and e.value < 0:
        return _PREC["unary"]
    return _PREC["atom"]


def _wrap(e, floor: int) -> str:
    s = expr_source(e)
    return f"({s})" if _prec(e) <= floor else s


def _num(v) -> str:
    if isinstance(v, bool):
        return repr(v)
    if isinstance(v, float) and v != v:
        raise ValueError("NaN literal cannot be printed")
    return repr(v)


def expr_source(e) -> str:
    if isinstance(e, N.Num):
        return _num(e.value)
    if isinstance(e, N.Str):
        return repr(e.value)
    if isinstance(e, N.Const):
        return repr(e.value)
    if isinstance(e, N.Name):
        return e.id
    if isinstance(e, N.ListExpr):
        return "[" + ", ".join(expr_source(x) for x in e.elts) + "]"
    if isinstance(e, N.TupleExpr):
        if len(e.elts) == 1:
            return "(" + expr_source(e.elts[0]) + ",)"
        return "(" + ", ".join(expr_source(x) for x in e.elts) + ")"
    if isinstance(e, N.DictExpr):
        items = ", ".join(f"{expr_source(k)}: {expr_source(v)}" for k, v in zip(e.keys, e.values))
        return "{" + items + "}"
    if isinstance(e, N.BinOp):
        p = _PREC[e.op]
        if e.op == "**":
            # right-associative, and the exponent may be a bare unary
            return f"{_wrap(e.left, p)} ** {_wrap(e.right, _PREC['unary'] - 1)}"
        return f"{_wrap(e.left, p - 1)} {e.op} {_wrap(e.right, p)}"
    if isinstance(e, N.UnaryOp):
        if e.op == "not":
            return f"not {_wrap(e.operand, _PREC['not'] - 1)}"
        return f"{e.op}{_wrap(e.operand, _PREC['unary'] - 1)}"
    if isinstance(e, N.BoolOp):
        p = _PREC[e.op]
        return f" {e.op} ".join(_wrap(v, p) for v in e.values)
    if isinstance(e, N.Compare):
        p = _PREC["cmp"]
        parts = [_wrap(e.left, p)]
        for op, c in zip(e.ops, e.comparators):
            parts.append(op)
            parts.append(_wrap(c, p))
        return " ".join(parts)
    if isinstance(e, N.IfExp):
        p = _PREC["ifexp"]
        return f"{_wrap(e.body, p)} if {_wrap(e.test, p)} else {expr_source(e.orelse)}"
    if isinstance(e, N.Call):
        args = [expr_source(a) for a in e.args] + [f"{k}={expr_source(v)}" for k, v in e.keywords]
        return f"{_wrap(e.func, _PREC['atom'] - 1)}({', '.join(args)})"
    if isinstance(e, N.Attribute):
        return f"{_wrap(e.value, _PREC['atom'] - 1)}.{e.attr}"
    if isinstance(e, N.Subscript):
        idx = e.index
        inner = ", ".join(expr_source(x) for x in idx.elts) if isinstance(idx, N.TupleExpr) and len(idx.elts) > 1 \
            else expr_source(idx)
        return f"{_wrap(e.value, _PREC['atom'] - 1)}[{inner}]"
    if isinstance(e, N.TuplePattern):
        if len(e.elts) == 1:
            return "(" + expr_source(e.elts[0]) + ",)"
        return "(" + ", ".join(expr_source(x) for x in e.elts) + ")"
    if isinstance(e, N.ListPattern):
        return "[" + ", ".join(expr_source(x) for x in e.elts) + "]"
    raise TypeError(f"cannot print {type(e).__name__}")


def _stmt_lines(s, depth: int) -> list[str]:
    pad = INDENT * depth
    if isinstance(s, N.Assign):
        lhs = " = ".join(expr_source(t) for t in s.targets)
        return [f"{pad}{lhs} = {expr_source(s.value)}"]
    if isinstance(s, N.AugAssign):
        return [f"{pad}{s.target.id} {s.op}= {expr_source(s.value)}"]
    if isinstance(s, N.Return):
        return [f"{pad}return" if s.value is None else f"{pad}return {expr_source(s.value)}"]
    if isinstance(s, N.ExprStmt):
        return [f"{pad}{expr_source(s.value)}"]
    if isinstance(s, N.Pass):
        return [f"{pad}pass"]
    if isinstance(s, N.For):
        out = [f"{pad}for {expr_source(s.target)} in {expr_source(s.iter)}:"]
        return out + _block(s.body, depth + 1)
    if isinstance(s, N.If):
        out = [f"{pad}if {expr_source(s.test)}:"] + _block(s.body, depth + 1)
        if s.orelse:
            out.append(f"{pad}else:")
            out += _block(s.orelse, depth + 1)
        return out
    if isinstance(s, N.FunctionDef):
        out = [f"{pad}def {s.name}({', '.join(s.params)}):"]
        return out + _block(s.body, depth + 1)
    raise TypeError(f"cannot print {type(s).__name__}")


def _block(body, depth: int) -> list[str]:
    if not body:
        return [INDENT * depth + "pass"]
    lines = []
    for s in body:
        lines.extend(_stmt_lines(s, depth))
    return lines


def to_source(tree) -> str:
    if isinstance(tree, N.Module):
        chunks = []
        for s in tree.body:
            chunks.append("\n".join(_stmt_lines(s, 0)))
        return "\n\n".join(chunks) + "\n"
    if isinstance(tree, N.FunctionDef) or type(tree).__name__ in ("Assign", "AugAssign", "Return",
                                                                  "ExprStmt", "Pass", "For", "If"):
        return "\n".join(_stmt_lines(tree, 0)) + "\n"
    return expr_source(tree)
