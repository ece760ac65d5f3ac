"""Recursive-descent parser for the plan-sketch language.

The surface syntax is a small, loop-bounded subset of Python, so lexing is
delegated to :mod:`tokenize`.  Anything outside the subset is rejected with an
``unsupported-construct`` error that names the construct; malformed input is a
``parse-error``.  Both carry a line and column.
"""

from __future__ import annotations

import io
import tokenize
from token import DEDENT, ENDMARKER, INDENT, NAME, NEWLINE, NUMBER, OP, STRING

from ..errors import ProgramError
from . import nodes as N

_SKIP = {tokenize.COMMENT, tokenize.NL, tokenize.ENCODING}

# keywords with no place in a plan sketch, mapped to the name used in errors
_UNSUPPORTED = {
    "while": "while loop",
    "import": "import",
    "from": "import",
    "class": "class definition",
    "lambda": "lambda",
    "with": "with statement",
    "try": "try statement",
    "except": "try statement",
    "finally": "try statement",
    "raise": "raise statement",
    "global": "global statement",
    "nonlocal": "nonlocal statement",
    "del": "del statement",
    "yield": "generator",
    "async": "async code",
    "await": "async code",
    "assert": "assert statement",
    "break": "break statement",
    "continue": "continue statement",
    "is": "identity comparison",
}

_AUG_OPS = {"+=": "+", "-=": "-", "*=": "*", "/=": "/"}
_COMPARE_OPS = {"<", "<=", ">", ">=", "==", "!="}
_KEYWORDS = {"def", "return", "for", "in", "if", "elif", "else", "and", "or", "not",
             "True", "False", "None", "pass"} | set(_UNSUPPORTED)


class _Tok:
    __slots__ = ("type", "string", "line", "col")

    def __init__(self, type_, string, line, col):
        self.type = type_
        self.string = string
        self.line = line
        self.col = col

    def __repr__(self):
        return f"_Tok({tokenize.tok_name[self.type]}, {self.string!r})"


def _lex(source: str) -> list[_Tok]:
    out = []
    try:
        for t in tokenize.generate_tokens(io.StringIO(source).readline):
            if t.type in _SKIP:
                continue
            if t.type == tokenize.ERRORTOKEN and t.string.isspace():
                continue
            if t.type == tokenize.ERRORTOKEN:
                raise ProgramError(f"unexpected character {t.string!r}", "parse-error", t.start[0], t.start[1] + 1)
            if t.type == OP and t.string == ":=":
                raise ProgramError("unsupported construct: assignment expression", "unsupported-construct",
                                   t.start[0], t.start[1] + 1)
            out.append(_Tok(t.type, t.string, t.start[0], t.start[1] + 1))
    except tokenize.TokenError as e:
        msg, (line, col) = e.args
        raise ProgramError(msg.rstrip("."), "parse-error", line, col + 1) from None
    except IndentationError as e:
        raise ProgramError(e.msg, "parse-error", e.lineno, (e.offset or 0) + 1) from None
    return out


class Parser:
    def __init__(self, source: str):
        self.toks = _lex(source)
        self.i = 0

    # token helpers ---------------------------------------------------------

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        if self.i < len(self.toks) - 1:
            self.i += 1
        return t

    def at(self, string: str, type_: int | None = None) -> bool:
        t = self.tok
        if type_ is not None and t.type != type_:
            return False
        return t.string == string and t.type in (OP, NAME)

    def accept(self, string: str) -> bool:
        if self.at(string):
            self.advance()
            return True
        return False

    def expect(self, string: str) -> _Tok:
        if not self.at(string):
            self.error(f"expected {string!r}")
        return self.advance()

    def error(self, msg: str, tok: _Tok | None = None, code: str = "parse-error"):
        t = tok or self.tok
        if code == "parse-error" and t.type != ENDMARKER:
            shown = "end of line" if t.type == NEWLINE else repr(t.string)
            msg = f"{msg}, found {shown}"
        elif code == "parse-error":
            msg = f"{msg}, found end of input"
        raise ProgramError(msg, code, t.line, t.col)

    def unsupported(self, what: str, tok: _Tok | None = None):
        t = tok or self.tok
        raise ProgramError(f"unsupported construct: {what}", "unsupported-construct", t.line, t.col)

    def check_keyword(self):
        t = self.tok
        if t.type == NAME and t.string in _UNSUPPORTED:
            self.unsupported(_UNSUPPORTED[t.string])

    # module and statements --------------------------------------------------

    def parse_module(self) -> N.Module:
        body = []
        while self.tok.type != ENDMARKER:
            if self.tok.type == NEWLINE:
                self.advance()
                continue
            if self.tok.type == INDENT:
                self.error("unexpected indent")
            if self.at("def", NAME):
                body.append(self.funcdef())
            else:
                body.extend(self.statement(top=True))
        return N.Module(tuple(body), line=1, col=1)

    def funcdef(self) -> N.FunctionDef:
        start = self.expect("def")
        name = self.tok
        if name.type != NAME or name.string in _KEYWORDS:
            self.error("expected function name")
        self.advance()
        self.expect("(")
        params = []
        while not self.at(")"):
            if self.at("*") or self.at("**"):
                self.unsupported("variadic parameters")
            p = self.tok
            if p.type != NAME or p.string in _KEYWORDS:
                self.error("expected parameter name")
            self.advance()
            if p.string in params:
                raise ProgramError(f"duplicate parameter {p.string!r}", "parse-error", p.line, p.col)
            params.append(p.string)
            if self.accept(":"):
                self.expr()  # annotation, ignored
            if self.at("="):
                self.unsupported("default parameter values")
            if not self.accept(","):
                break
        self.expect(")")
        if self.accept("->"):
            self.expr()
        self.expect(":")
        body = self.block(in_function=True)
        return N.FunctionDef(name.string, tuple(params), tuple(body), line=start.line, col=start.col)

    def block(self, in_function: bool = False) -> list:
        if self.tok.type != NEWLINE:
            return self.simple_line()
        self.advance()
        if self.tok.type != INDENT:
            self.error("expected an indented block")
        self.advance()
        body = []
        while self.tok.type not in (DEDENT, ENDMARKER):
            if self.tok.type == NEWLINE:
                self.advance()
                continue
            if self.at("def", NAME):
                self.unsupported("nested function definition")
            body.extend(self.statement())
        if self.tok.type == DEDENT:
            self.advance()
        return body

    def statement(self, top: bool = False) -> list:
        self.check_keyword()
        t = self.tok
        if t.type == NAME:
            if t.string == "for":
                return [self.for_stmt()]
            if t.string == "if":
                return [self.if_stmt()]
        if t.type == OP and t.string == "@":
            self.unsupported("decorator")
        return self.simple_line()

    def simple_line(self) -> list:
        stmt = self.simple_stmt()
        if self.at(";"):
            self.unsupported("semicolon-separated statements")
        if self.tok.type not in (NEWLINE, ENDMARKER):
            self.error("expected end of line")
        if self.tok.type == NEWLINE:
            self.advance()
        return [stmt]

    def simple_stmt(self):
        self.check_keyword()
        t = self.tok
        if t.type == NAME and t.string == "pass":
            self.advance()
            return N.Pass(line=t.line, col=t.col)
        if t.type == NAME and t.string == "return":
            self.advance()
            if self.tok.type in (NEWLINE, ENDMARKER):
                return N.Return(None, line=t.line, col=t.col)
            return N.Return(self.exprlist(), line=t.line, col=t.col)
        if t.type == NAME and t.string in ("def", "for", "if", "elif", "else"):
            self.error("expected a simple statement")
        first = self.exprlist()
        if self.at("="):
            targets = [first]
            value = None
            while self.accept("="):
                value = self.exprlist()
                targets.append(value)
            targets.pop()
            pats = tuple(self.to_pattern(x) for x in targets)
            return N.Assign(pats, value, line=t.line, col=t.col)
        if self.tok.type == OP and self.tok.string in _AUG_OPS:
            op = _AUG_OPS[self.advance().string]
            if not isinstance(first, N.Name):
                self.unsupported("augmented assignment to a non-name", t)
            return N.AugAssign(first, op, self.exprlist(), line=t.line, col=t.col)
        if self.tok.type == OP and self.tok.string.endswith("=") and self.tok.string not in _COMPARE_OPS:
            self.unsupported(f"operator {self.tok.string}")
        if self.at(":") and isinstance(first, N.Name):
            # annotated assignment, `x: float = 1`
            self.advance()
            self.expr()
            self.expect("=")
            value = self.exprlist()
            return N.Assign((first,), value, line=t.line, col=t.col)
        return N.ExprStmt(first, line=t.line, col=t.col)

    def to_pattern(self, e):
        if isinstance(e, N.Name):
            return e
        if isinstance(e, N.TupleExpr):
            return N.TuplePattern(tuple(self.to_pattern(x) for x in e.elts), line=e.line, col=e.col)
        if isinstance(e, N.ListExpr):
            return N.ListPattern(tuple(self.to_pattern(x) for x in e.elts), line=e.line, col=e.col)
        if isinstance(e, (N.Subscript, N.Attribute)):
            raise ProgramError("unsupported construct: item or attribute assignment",
                               "unsupported-construct", e.line, e.col)
        raise ProgramError("cannot assign to expression", "parse-error", e.line, e.col)

    def for_stmt(self) -> N.For:
        t = self.expect("for")
        target = self.target_list()
        self.expect("in")
        it = self.exprlist()
        self.expect(":")
        body = self.block()
        if self.at("else", NAME):
            self.unsupported("for-else")
        return N.For(target, it, tuple(body), line=t.line, col=t.col)

    def target_list(self):
        t = self.tok
        items = [self.or_expr_target()]
        trailing = False
        while self.accept(","):
            if self.at("in", NAME):
                trailing = True
                break
            items.append(self.or_expr_target())
        if len(items) == 1 and not trailing:
            return self.to_pattern(items[0])
        return N.TuplePattern(tuple(self.to_pattern(x) for x in items), line=t.line, col=t.col)

    def or_expr_target(self):
        # a loop target must not swallow the `in` keyword as a comparison
        return self.arith()

    def if_stmt(self) -> N.If:
        t = self.advance()  # if / elif
        test = self.expr()
        self.expect(":")
        body = self.block()
        orelse: list = []
        while self.tok.type == NEWLINE:
            self.advance()
        if self.at("elif", NAME):
            orelse = [self.if_stmt()]
        elif self.at("else", NAME):
            self.advance()
            self.expect(":")
            orelse = self.block()
        return N.If(test, tuple(body), tuple(orelse), line=t.line, col=t.col)

    # expressions -----------------------------------------------------------

    def exprlist(self):
        """Comma-separated expressions; more than one (or a trailing comma) makes a tuple."""
        t = self.tok
        first = self.expr()
        if not self.at(","):
            return first
        items = [first]
        while self.accept(","):
            if self._ends_exprlist():
                break
            items.append(self.expr())
        return N.TupleExpr(tuple(items), line=t.line, col=t.col)

    def _ends_exprlist(self) -> bool:
        t = self.tok
        return t.type in (NEWLINE, ENDMARKER) or (t.type == OP and t.string in ("=", ")", ":")) \
            or (t.type == OP and t.string in _AUG_OPS)

    def expr(self):
        self.check_keyword()
        t = self.tok
        body = self.or_test()
        if self.at("if", NAME):
            self.advance()
            test = self.or_test()
            self.expect("else")
            orelse = self.expr()
            return N.IfExp(test, body, orelse, line=t.line, col=t.col)
        return body

    def or_test(self):
        t = self.tok
        values = [self.and_test()]
        while self.accept("or"):
            values.append(self.and_test())
        return values[0] if len(values) == 1 else N.BoolOp("or", tuple(values), line=t.line, col=t.col)

    def and_test(self):
        t = self.tok
        values = [self.not_test()]
        while self.accept("and"):
            values.append(self.not_test())
        return values[0] if len(values) == 1 else N.BoolOp("and", tuple(values), line=t.line, col=t.col)

    def not_test(self):
        t = self.tok
        if self.accept("not"):
            return N.UnaryOp("not", self.not_test(), line=t.line, col=t.col)
        return self.comparison()

    def comparison(self):
        t = self.tok
        left = self.arith()
        ops, comps = [], []
        while True:
            self.check_keyword()
            if self.tok.type == OP and self.tok.string in _COMPARE_OPS:
                ops.append(self.advance().string)
            elif self.at("in", NAME):
                self.advance()
                ops.append("in")
            elif self.at("not", NAME) and self.peek().string == "in":
                self.advance()
                self.advance()
                ops.append("not in")
            else:
                break
            comps.append(self.arith())
        if not ops:
            return left
        return N.Compare(left, tuple(ops), tuple(comps), line=t.line, col=t.col)

    def arith(self):
        left = self.term()
        while self.tok.type == OP and self.tok.string in ("+", "-"):
            op = self.advance()
            left = N.BinOp(op.string, left, self.term(), line=op.line, col=op.col)
        if self.tok.type == OP and self.tok.string in ("|", "&", "^", "<<", ">>"):
            self.unsupported(f"bitwise operator {self.tok.string}")
        return left

    def term(self):
        left = self.factor()
        while self.tok.type == OP and self.tok.string in ("*", "/", "//", "%"):
            op = self.advance()
            left = N.BinOp(op.string, left, self.factor(), line=op.line, col=op.col)
        if self.tok.type == OP and self.tok.string == "@":
            self.unsupported("matrix multiplication")
        return left

    def factor(self):
        t = self.tok
        if t.type == OP and t.string in ("-", "+"):
            self.advance()
            return N.UnaryOp(t.string, self.factor(), line=t.line, col=t.col)
        if t.type == OP and t.string == "~":
            self.unsupported("bitwise operator ~")
        return self.power()

    def power(self):
        base = self.postfix()
        if self.tok.type == OP and self.tok.string == "**":
            op = self.advance()
            return N.BinOp("**", base, self.factor(), line=op.line, col=op.col)
        return base

    def postfix(self):
        e = self.atom()
        while True:
            t = self.tok
            if self.accept("("):
                args, kws = self.call_args()
                e = N.Call(e, tuple(args), tuple(kws), line=e.line, col=e.col)
            elif self.accept("["):
                if self.at(":"):
                    self.unsupported("slicing")
                idx = self.exprlist_in_brackets()
                if self.at(":"):
                    self.unsupported("slicing")
                self.expect("]")
                e = N.Subscript(e, idx, line=e.line, col=e.col)
            elif self.accept("."):
                name = self.tok
                if name.type != NAME:
                    self.error("expected attribute name")
                self.advance()
                if name.string.startswith("__"):
                    self.unsupported("dunder attribute access", name)
                e = N.Attribute(e, name.string, line=t.line, col=t.col)
            else:
                return e

    def exprlist_in_brackets(self):
        t = self.tok
        first = self.expr()
        if not self.at(","):
            return first
        items = [first]
        while self.accept(","):
            if self.at("]"):
                break
            items.append(self.expr())
        return N.TupleExpr(tuple(items), line=t.line, col=t.col)

    def call_args(self):
        args, kws = [], []
        while not self.at(")"):
            if self.at("*") or self.at("**"):
                self.unsupported("argument unpacking")
            if self.tok.type == NAME and self.peek().type == OP and self.peek().string == "=":
                name = self.advance().string
                self.advance()
                kws.append((name, self.expr()))
            else:
                if kws:
                    self.error("positional argument after keyword argument")
                args.append(self.expr())
                if self.at("for", NAME):
                    self.unsupported("generator expression")
            if not self.accept(","):
                break
        self.expect(")")
        return args, kws

    def atom(self):
        self.check_keyword()
        t = self.tok
        if t.type == NUMBER:
            self.advance()
            text = t.string.replace("_", "")
            if text[-1] in "jJ":
                self.unsupported("complex number", t)
            try:
                value = int(text, 0) if text.isdigit() or text[:2].lower() in ("0x", "0o", "0b") else float(text)
            except ValueError:
                value = float(text)
            return N.Num(value, line=t.line, col=t.col)
        if t.type == STRING:
            parts = []
            while self.tok.type == STRING:
                s = self.advance()
                prefix = s.string[: len(s.string) - len(s.string.lstrip("rRbBuUfF"))].lower()
                if "f" in prefix:
                    self.unsupported("f-string", s)
                if "b" in prefix:
                    self.unsupported("bytes literal", s)
                parts.append(_string_value(s.string))
            return N.Str("".join(parts), line=t.line, col=t.col)
        if t.type == NAME:
            if t.string in ("True", "False", "None"):
                self.advance()
                return N.Const({"True": True, "False": False, "None": None}[t.string], line=t.line, col=t.col)
            if t.string in _KEYWORDS:
                self.error("expected an expression")
            self.advance()
            return N.Name(t.string, line=t.line, col=t.col)
        if t.type == OP and t.string == "(":
            self.advance()
            if self.accept(")"):
                return N.TupleExpr((), line=t.line, col=t.col)
            first = self.expr()
            if self.at("for", NAME):
                self.unsupported("generator expression")
            if self.accept(")"):
                return first
            items = [first]
            while self.accept(","):
                if self.at(")"):
                    break
                items.append(self.expr())
            self.expect(")")
            return N.TupleExpr(tuple(items), line=t.line, col=t.col)
        if t.type == OP and t.string == "[":
            self.advance()
            items = []
            while not self.at("]"):
                items.append(self.expr())
                if self.at("for", NAME):
                    self.unsupported("list comprehension")
                if not self.accept(","):
                    break
            self.expect("]")
            return N.ListExpr(tuple(items), line=t.line, col=t.col)
        if t.type == OP and t.string == "{":
            self.advance()
            keys, values = [], []
            while not self.at("}"):
                k = self.expr()
                if not self.at(":"):
                    self.unsupported("set literal")
                self.advance()
                keys.append(k)
                values.append(self.expr())
                if self.at("for", NAME):
                    self.unsupported("dict comprehension")
                if not self.accept(","):
                    break
            self.expect("}")
            return N.DictExpr(tuple(keys), tuple(values), line=t.line, col=t.col)
        if t.type == OP and t.string == "...":
            self.unsupported("ellipsis")
        self.error("expected an expression")


def _string_value(literal: str) -> str:
    import ast as pyast
    return pyast.literal_eval(literal)


def parse(source: str) -> N.Module:
    """Parse a plan-sketch source text into a :class:`~ccsplan.lmp.nodes.Module`."""
    return Parser(source).parse_module()


def parse_expr(source: str):
    p = Parser(source)
    e = p.exprlist()
    while p.tok.type == NEWLINE:
        p.advance()
    if p.tok.type != ENDMARKER:
        p.error("unexpected trailing input")
    return e
