"""Tiny bivariate expression language for the CLI.

Grammar: constants, variables x/y, sin/cos/exp/abs, binary + - * / ^ and
unary minus. Precedence: ^ binds tightest, then unary minus, then * /, then
+ -. All binary operators associate to the left.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import ExprEvalError, ExprSyntaxError


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # neg | sin | cos | exp | abs
    operand: "ExprAst"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / ^
    left: "ExprAst"
    right: "ExprAst"


ExprAst = Const | Var | Unary | Binary

_FUNCS = ("sin", "cos", "exp", "abs")

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {stripped[0]!r}", at)
        if m.group("num") is not None:
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected {op!r}", pos)

    def parse(self) -> ExprAst:
        node = self.sum()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {val!r}", pos)
        return node

    def sum(self) -> ExprAst:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                node = Binary(val, node, self.term())
            else:
                return node

    def term(self) -> ExprAst:
        node = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                node = Binary(val, node, self.unary())
            else:
                return node

    def unary(self) -> ExprAst:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Unary("neg", self.unary())
        return self.power()

    def power(self) -> ExprAst:
        node = self.atom()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "^":
                self.take()
                node = Binary("^", node, self.atom())
            else:
                return node

    def atom(self) -> ExprAst:
        kind, val, pos = self.take()
        if kind == "num":
            return Const(float(val))
        if kind == "name":
            if val in ("x", "y"):
                return Var(val)
            if val in _FUNCS:
                self.expect_op("(")
                inner = self.sum()
                self.expect_op(")")
                return Unary(val, inner)
            raise ExprSyntaxError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            inner = self.sum()
            self.expect_op(")")
            return inner
        raise ExprSyntaxError(f"expected a value, got {val or 'end of input'!r}", pos)


def parse_expr(text: str) -> ExprAst:
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing (canonical, round-trip stable)

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(node: ExprAst) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary):
        return _PREC["neg"] if node.op == "neg" else 5
    return 5


def expr_to_str(node: ExprAst) -> str:
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            inner = expr_to_str(node.operand)
            if _prec(node.operand) < _PREC["neg"]:
                inner = f"({inner})"
            return f"-{inner}"
        return f"{node.op}({expr_to_str(node.operand)})"
    left = expr_to_str(node.left)
    right = expr_to_str(node.right)
    if _prec(node.left) < _PREC[node.op]:
        left = f"({left})"
    if _prec(node.right) <= _PREC[node.op]:  # left-associative
        right = f"({right})"
    return f"{left}{node.op}{right}"


# ---------------------------------------------------------------------------
# evaluation

def _eval_node(node: ExprAst, x, y):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return x if node.name == "x" else y
    if isinstance(node, Unary):
        v = _eval_node(node.operand, x, y)
        if node.op == "neg":
            return -v
        if node.op == "sin":
            return np.sin(v)
        if node.op == "cos":
            return np.cos(v)
        if node.op == "exp":
            return np.exp(v)
        return np.abs(v)
    l = _eval_node(node.left, x, y)
    r = _eval_node(node.right, x, y)
    op = node.op
    if op == "+":
        return l + r
    if op == "-":
        return l - r
    if op == "*":
        return l * r
    if op == "/":
        if np.any(np.asarray(r) == 0):
            raise ExprEvalError(f"division by zero in '{expr_to_str(node)}'")
        return l / r
    # '^': nonnegative constant integer exponents are exact powers; anything
    # else becomes exp(r*log(l)) and needs a positive base
    if isinstance(node.right, Const) and float(node.right.value).is_integer() and node.right.value >= 0:
        return np.power(l, int(node.right.value))
    if np.any(np.asarray(l) <= 0):
        raise ExprEvalError(
            f"'^' needs a positive base for non-integer exponents in '{expr_to_str(node)}'"
        )
    return np.exp(r * np.log(l))


def eval_expr(ast: ExprAst, x: float, y: float) -> float:
    """Evaluate at a point; raises ExprEvalError on any non-finite result."""
    with np.errstate(all="ignore"):
        v = _eval_node(ast, float(x), float(y))
    v = float(v)
    if not np.isfinite(v):
        raise ExprEvalError(f"non-finite result from '{expr_to_str(ast)}' at ({x}, {y})")
    return v


def eval_expr_array(ast: ExprAst, x, y):
    """Broadcasting evaluation; raises if any element is non-finite."""
    with np.errstate(all="ignore"):
        v = _eval_node(ast, np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ExprEvalError(f"non-finite result from '{expr_to_str(ast)}'")
    return v
