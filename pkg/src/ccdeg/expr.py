"""Closed-form expression trees over 1 or 2 real variables.

The node set is deliberately small (constants, coordinates, + - * /,
min, max, abs, exp, sin, cos, powers) so that scenario files stay
portable and every expression supports three evaluation modes:

* ``evaluate``        scalar point evaluation,
* ``evaluate_batch``  vectorized evaluation on numpy arrays,
* ``evaluate_interval`` a rigorous range enclosure over a box.

Expressions are immutable; ``substitute`` binds one variable to a
constant and reindexes the rest, which is how homotopy slices and
discontinuity curves reuse the same machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import intervals as iv
from .errors import ExprParseError

_UNARY_FUNCS = {
    "neg": (lambda v: -v, np.negative, iv.neg),
    "abs": (abs, np.abs, iv.iabs),
    "exp": (math.exp, np.exp, iv.iexp),
    "sin": (math.sin, np.sin, iv.isin),
    "cos": (math.cos, np.cos, iv.icos),
}

_BINARY_FUNCS = {
    "+": (lambda a, b: a + b, np.add, iv.add),
    "-": (lambda a, b: a - b, np.subtract, iv.sub),
    "*": (lambda a, b: a * b, np.multiply, iv.mul),
    "/": (lambda a, b: a / b, np.divide, iv.div),
    "min": (min, np.minimum, iv.imin),
    "max": (max, np.maximum, iv.imax),
}


@dataclass(frozen=True)
class Expr:
    """Base node; concrete nodes are Const, Var, Unary, Binary, Pow."""

    def __call__(self, point) -> float:
        return evaluate(self, point)


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    index: int


@dataclass(frozen=True)
class Unary(Expr):
    op: str
    arg: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: float


def evaluate(e: Expr, point) -> float:
    """Evaluate at a point given as a sequence of coordinates."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return float(point[e.index])
    if isinstance(e, Unary):
        return _UNARY_FUNCS[e.op][0](evaluate(e.arg, point))
    if isinstance(e, Binary):
        return _BINARY_FUNCS[e.op][0](evaluate(e.left, point), evaluate(e.right, point))
    if isinstance(e, Pow):
        return evaluate(e.base, point) ** e.exponent
    raise TypeError(f"unknown node {e!r}")


def evaluate_batch(e: Expr, coords: list[np.ndarray]) -> np.ndarray:
    """Evaluate on aligned coordinate arrays, one array per variable."""
    if isinstance(e, Const):
        return np.full_like(coords[0], e.value, dtype=float)
    if isinstance(e, Var):
        return np.asarray(coords[e.index], dtype=float)
    if isinstance(e, Unary):
        return _UNARY_FUNCS[e.op][1](evaluate_batch(e.arg, coords))
    if isinstance(e, Binary):
        return _BINARY_FUNCS[e.op][1](
            evaluate_batch(e.left, coords), evaluate_batch(e.right, coords)
        )
    if isinstance(e, Pow):
        return evaluate_batch(e.base, coords) ** e.exponent
    raise TypeError(f"unknown node {e!r}")


def evaluate_interval(e: Expr, box: list[iv.Ival]) -> iv.Ival:
    """Enclosure of the range of ``e`` over a box, one interval per variable."""
    if isinstance(e, Const):
        return iv.exact(e.value)
    if isinstance(e, Var):
        return box[e.index]
    if isinstance(e, Unary):
        return _UNARY_FUNCS[e.op][2](evaluate_interval(e.arg, box))
    if isinstance(e, Binary):
        return _BINARY_FUNCS[e.op][2](
            evaluate_interval(e.left, box), evaluate_interval(e.right, box)
        )
    if isinstance(e, Pow):
        return iv.ipow(evaluate_interval(e.base, box), e.exponent)
    raise TypeError(f"unknown node {e!r}")


def substitute(e: Expr, index: int, value: float) -> Expr:
    """Bind variable ``index`` to ``value``; higher indices shift down by one."""
    if isinstance(e, Const):
        return e
    if isinstance(e, Var):
        if e.index == index:
            return Const(value)
        return Var(e.index - 1) if e.index > index else e
    if isinstance(e, Unary):
        return Unary(e.op, substitute(e.arg, index, value))
    if isinstance(e, Binary):
        return Binary(e.op, substitute(e.left, index, value), substitute(e.right, index, value))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, index, value), e.exponent)
    raise TypeError(f"unknown node {e!r}")


def variables(e: Expr) -> set[int]:
    if isinstance(e, Const):
        return set()
    if isinstance(e, Var):
        return {e.index}
    if isinstance(e, Unary):
        return variables(e.arg)
    if isinstance(e, Binary):
        return variables(e.left) | variables(e.right)
    if isinstance(e, Pow):
        return variables(e.base)
    raise TypeError(f"unknown node {e!r}")


def to_text(e: Expr, names: tuple[str, ...]) -> str:
    """Render an expression back to parseable infix text."""
    if isinstance(e, Const):
        return repr(e.value)
    if isinstance(e, Var):
        return names[e.index]
    if isinstance(e, Unary):
        if e.op == "neg":
            return f"(-{to_text(e.arg, names)})"
        return f"{e.op}({to_text(e.arg, names)})"
    if isinstance(e, Binary):
        if e.op in ("min", "max"):
            return f"{e.op}({to_text(e.left, names)}, {to_text(e.right, names)})"
        return f"({to_text(e.left, names)} {e.op} {to_text(e.right, names)})"
    if isinstance(e, Pow):
        return f"({to_text(e.base, names)} ^ {e.exponent!r})"
    raise TypeError(f"unknown node {e!r}")


# ----------------------------------------------------------------------
# Parsing: a small infix grammar with ^ for powers and the named
# functions min(a, b), max(a, b), abs(x), exp(x), sin(x), cos(x).
# ----------------------------------------------------------------------

_FUNCTIONS_1 = ("abs", "exp", "sin", "cos")
_FUNCTIONS_2 = ("min", "max")


class _Tokenizer:
    def __init__(self, text: str, line: int):
        self.text = text
        self.line = line
        self.pos = 0
        self.tokens: list[tuple[str, str, int]] = []
        self._scan()
        self.cursor = 0

    def _scan(self):
        text = self.text
        i = 0
        while i < len(text):
            c = text[i]
            if c.isspace():
                i += 1
                continue
            if c.isdigit() or (c == "." and i + 1 < len(text) and text[i + 1].isdigit()):
                j = i + 1
                while j < len(text) and (text[j].isdigit() or text[j] == "."):
                    j += 1
                if j < len(text) and text[j] in "eE":
                    k = j + 1
                    if k < len(text) and text[k] in "+-":
                        k += 1
                    if k < len(text) and text[k].isdigit():
                        j = k + 1
                        while j < len(text) and text[j].isdigit():
                            j += 1
                self.tokens.append(("num", text[i:j], i))
                i = j
                continue
            if c.isalpha() or c == "_":
                j = i + 1
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.tokens.append(("name", text[i:j], i))
                i = j
                continue
            if c in "+-*/^(),":
                self.tokens.append((c, c, i))
                i += 1
                continue
            raise ExprParseError(f"unexpected character {c!r}", self.line, i + 1)
        self.tokens.append(("end", "", len(text)))

    def peek(self):
        return self.tokens[self.cursor]

    def next(self):
        tok = self.tokens[self.cursor]
        self.cursor += 1
        return tok

    def fail(self, message: str, tok=None):
        tok = tok or self.peek()
        raise ExprParseError(message, self.line, tok[2] + 1)


class _Parser:
    """Precedence-climbing parser: + - < * / < unary - < ^ (right assoc)."""

    def __init__(self, tz: _Tokenizer, names: tuple[str, ...]):
        self.tz = tz
        self.names = {n: i for i, n in enumerate(names)}

    def parse(self) -> Expr:
        e = self._sum()
        if self.tz.peek()[0] != "end":
            self.tz.fail("trailing input after expression")
        return e

    def _sum(self) -> Expr:
        e = self._term()
        while self.tz.peek()[0] in ("+", "-"):
            op = self.tz.next()[0]
            e = Binary(op, e, self._term())
        return e

    def _term(self) -> Expr:
        e = self._unary()
        while self.tz.peek()[0] in ("*", "/"):
            op = self.tz.next()[0]
            e = Binary(op, e, self._unary())
        return e

    def _unary(self) -> Expr:
        if self.tz.peek()[0] == "-":
            self.tz.next()
            return Unary("neg", self._unary())
        if self.tz.peek()[0] == "+":
            self.tz.next()
            return self._unary()
        return self._power()

    def _power(self) -> Expr:
        base = self._atom()
        if self.tz.peek()[0] == "^":
            tok = self.tz.next()
            exp = self._unary()
            if isinstance(exp, Unary) and exp.op == "neg" and isinstance(exp.arg, Const):
                exp = Const(-exp.arg.value)
            if not isinstance(exp, Const):
                self.tz.fail("power exponent must be a constant", tok)
            return Pow(base, exp.value)
        return base

    def _atom(self) -> Expr:
        kind, value, _ = self.tz.peek()
        if kind == "num":
            self.tz.next()
            return Const(float(value))
        if kind == "(":
            self.tz.next()
            e = self._sum()
            if self.tz.peek()[0] != ")":
                self.tz.fail("expected ')'")
            self.tz.next()
            return e
        if kind == "name":
            tok = self.tz.next()
            name = tok[1]
            if name == "pi":
                return Const(math.pi)
            if name in _FUNCTIONS_1 or name in _FUNCTIONS_2:
                if self.tz.peek()[0] != "(":
                    self.tz.fail(f"expected '(' after {name}")
                self.tz.next()
                first = self._sum()
                if name in _FUNCTIONS_2:
                    if self.tz.peek()[0] != ",":
                        self.tz.fail(f"{name} takes two arguments")
                    self.tz.next()
                    second = self._sum()
                    e = Binary(name, first, second)
                else:
                    e = Unary(name, first)
                if self.tz.peek()[0] != ")":
                    self.tz.fail("expected ')'")
                self.tz.next()
                return e
            if name in self.names:
                return Var(self.names[name])
            self.tz.fail(f"unknown name {name!r}", tok)
        self.tz.fail("expected a number, name or '('")


def parse(text: str, names: tuple[str, ...], line: int = 0) -> Expr:
    """Parse infix text into an Expr; ``names`` maps variables to indices.

    ``line`` (1-based) is attached to any ExprParseError for diagnostics.
    """
    return _Parser(_Tokenizer(text, line), names).parse()
