"""Arithmetic mini-language for coefficient profiles.

Grammar: numeric literals, the variable x, binary + - * / ^ with ^
right-associative, unary minus, the functions abs, exp, log and the
two-argument min, max, and parentheses.  Parsing is precedence-climbing;
printing is canonical (minimal parentheses) and round-trips through the
parser to an identical tree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvalError, ParseError

__all__ = ["ExprNode", "Num", "Var", "Neg", "Bin", "Call", "parse", "to_text"]


class ExprNode:
    """Base class of expression tree nodes."""

    def __call__(self, x):
        return evaluate(self, x)


@dataclass(frozen=True)
class Num(ExprNode):
    value: float


@dataclass(frozen=True)
class Var(ExprNode):
    pass


@dataclass(frozen=True)
class Neg(ExprNode):
    operand: ExprNode


@dataclass(frozen=True)
class Bin(ExprNode):
    op: str
    left: ExprNode
    right: ExprNode


@dataclass(frozen=True)
class Call(ExprNode):
    name: str
    args: tuple


_FUNCTIONS = {"abs": 1, "exp": 1, "log": 1, "min": 2, "max": 2}

# binding powers; '^' is right-associative, unary minus binds between
# '*' and '^' so -x^2 == -(x^2) and -x*y == (-x)*y
_LBP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_RBP = {"+": 11, "-": 11, "*": 21, "/": 21, "^": 39}
_UNARY_BP = 30


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind, text, pos):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            tokens.append(_Token("number", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], i))
            i = j
            continue
        if c in "+-*/^(),":
            kind = {"(": "lparen", ")": "rparen", ",": "comma"}.get(c, "op")
            tokens.append(_Token(kind, c, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", i, {"token"})
    tokens.append(_Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def current(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind, what):
        tok = self.current
        if tok.kind != kind:
            raise ParseError(
                f"expected {what}, found {tok.text or 'end of input'!r}",
                tok.pos,
                {what},
            )
        return self.advance()

    def parse_expression(self, min_bp=0):
        node = self.parse_prefix()
        while True:
            tok = self.current
            if tok.kind != "op" or _LBP[tok.text] <= min_bp:
                return node
            self.advance()
            rhs = self.parse_expression(_RBP[tok.text])
            node = Bin(tok.text, node, rhs)

    def parse_prefix(self):
        tok = self.current
        if tok.kind == "number":
            self.advance()
            try:
                return Num(float(tok.text))
            except ValueError:
                raise ParseError(f"bad numeric literal {tok.text!r}", tok.pos,
                                 {"number"}) from None
        if tok.kind == "ident":
            self.advance()
            if tok.text == "x":
                return Var()
            if tok.text in _FUNCTIONS:
                nargs = _FUNCTIONS[tok.text]
                self.expect("lparen", "'('")
                args = [self.parse_expression()]
                while len(args) < nargs:
                    self.expect("comma", "','")
                    args.append(self.parse_expression())
                self.expect("rparen", "')'")
                return Call(tok.text, tuple(args))
            raise ParseError(
                f"unknown identifier {tok.text!r}", tok.pos,
                {"x"} | set(_FUNCTIONS),
            )
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return Neg(self.parse_expression(_UNARY_BP))
        if tok.kind == "lparen":
            self.advance()
            node = self.parse_expression()
            self.expect("rparen", "')'")
            return node
        raise ParseError(
            f"expected a value, found {tok.text or 'end of input'!r}",
            tok.pos,
            {"number", "x", "(", "-"} | set(_FUNCTIONS),
        )


def parse(text):
    """Parse expression text into an ExprNode tree."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0, {"expression"})
    parser = _Parser(text)
    node = parser.parse_expression()
    end = parser.current
    if end.kind != "end":
        raise ParseError(
            f"unexpected trailing input {end.text!r}", end.pos, {"end of input"}
        )
    return node


def _print(node, ctx_bp=0):
    """Render a node, parenthesizing when its binding power is below the
    context's requirement."""
    if isinstance(node, Num):
        v = node.value
        text = repr(int(v)) if v == int(v) and abs(v) < 1e16 else repr(v)
        return f"({text})" if v < 0 and ctx_bp > _UNARY_BP else text
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Call):
        inner = ", ".join(_print(a, 0) for a in node.args)
        return f"{node.name}({inner})"
    if isinstance(node, Neg):
        text = f"-{_print(node.operand, _UNARY_BP)}"
        return f"({text})" if ctx_bp > _UNARY_BP else text
    if isinstance(node, Bin):
        bp = _LBP[node.op]
        if node.op == "^":
            left = _print(node.left, bp + 1)   # right-assoc: tie -> parens
            right = _print(node.right, bp)
            text = f"{left}^{right}"
        else:
            left = _print(node.left, bp)       # left-assoc: tie stays bare
            right = _print(node.right, bp + 1)
            text = f"{left} {node.op} {right}"
        return f"({text})" if bp < ctx_bp else text
    raise TypeError(f"not an expression node: {node!r}")


def to_text(node):
    """Canonical text form; parsing it reproduces the tree."""
    return _print(node, 0)


def evaluate(node, x):
    """Evaluate a tree elementwise at x (scalar or ndarray).

    Raises EvalError on domain faults: log of a nonpositive value,
    division by zero, fractional power of a negative base.
    """
    arr = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        out = _eval(node, arr)
    out = np.asarray(out, dtype=float)
    if out.shape != arr.shape:
        out = np.broadcast_to(out, arr.shape).copy()
    bad = np.isnan(out) & ~np.isnan(arr)
    if bad.any():
        raise EvalError("expression undefined at "
                        f"x={np.asarray(arr)[bad].ravel()[0]!r}")
    return out if isinstance(x, np.ndarray) else float(out)


def _eval(node, x):
    if isinstance(node, Num):
        return np.full_like(x, node.value)
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_eval(node.operand, x)
    if isinstance(node, Bin):
        a = _eval(node.left, x)
        b = _eval(node.right, x)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            out = a / b
            out = np.where(b == 0.0, np.nan, out)
            return out
        if node.op == "^":
            return np.power(a, b)
    if isinstance(node, Call):
        args = [_eval(a, x) for a in node.args]
        if node.name == "abs":
            return np.abs(args[0])
        if node.name == "exp":
            return np.exp(args[0])
        if node.name == "log":
            a = args[0]
            return np.where(a > 0.0, np.log(np.where(a > 0.0, a, 1.0)), np.nan)
        if node.name == "min":
            return np.minimum(args[0], args[1])
        if node.name == "max":
            return np.maximum(args[0], args[1])
    raise TypeError(f"not an expression node: {node!r}")
