"""Expression language for germs: parsing, exact series evaluation, numeric maps.

Grammar (precedence high to low)::

    primary  := NUMBER | NAME | NAME "(" expr ")" | "(" expr ")"
    power    := primary ["^" unary]          # right associative
    unary    := ("-" | "+") unary | power
    term     := unary (("*" | "/") unary)*
    expr     := term (("+" | "-") term)*

Bare names are ``z``, bound parameters, or the builtin germs ``expm1``,
``sin``, ``zexp`` and ``quadratic``.  Callable names are ``exp``, ``log``,
``sin``, ``expm1`` and ``moebius`` (whose argument must be constant).
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import EvaluationError, ParseError, SeriesError
from .poincare import EvaluableMap, cexpm1, jet_exp, jet_expm1, jet_log, jet_sin
from .series import PowerSeries, exp_series, log_series, sin_series

__all__ = [
    "Num",
    "Var",
    "Param",
    "Neg",
    "BinOp",
    "Call",
    "Germ",
    "parse",
    "eval_expression",
    "ExpressionMap",
    "GERMS",
    "FUNCTIONS",
]

GERMS = ("expm1", "sin", "zexp", "quadratic")
FUNCTIONS = ("exp", "log", "sin", "expm1", "moebius")


@dataclass(frozen=True)
class Num:
    value: Fraction
    pos: int = 0

    def __str__(self):
        return str(self.value) if self.value.denominator == 1 else f"({self.value})"


@dataclass(frozen=True)
class Var:
    pos: int = 0

    def __str__(self):
        return "z"


@dataclass(frozen=True)
class Param:
    name: str
    pos: int = 0

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg:
    arg: object
    pos: int = 0

    def __str__(self):
        return f"(-{self.arg})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    pos: int = 0

    def __str__(self):
        return f"({self.left}{self.op}{self.right})"


@dataclass(frozen=True)
class Call:
    name: str
    arg: object
    pos: int = 0

    def __str__(self):
        return f"{self.name}({self.arg})"


@dataclass(frozen=True)
class Germ:
    name: str
    pos: int = 0

    def __str__(self):
        return self.name


_TOKEN_RE = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        if m.group(1):
            toks.append(("num", m.group(1), m.start(1)))
        elif m.group(2):
            toks.append(("name", m.group(2), m.start(2)))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            toks.append(("op", op, m.start(3)))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text, params):
        self.toks = _tokenize(text)
        self.i = 0
        self.params = params

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            found = "end of input" if t[0] == "end" else repr(t[1])
            raise ParseError(f"expected {value!r}, found {found}", t[2])
        return t

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            t = self.take()
            node = BinOp(t[1], node, self.term(), t[2])
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            t = self.take()
            node = BinOp(t[1], node, self.unary(), t[2])
        return node

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            return Neg(self.unary(), t[2])
        if t[0] == "op" and t[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.primary()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            exponent = self.unary()
            k = _constant_value(exponent, self.params)
            if k is None or k.denominator != 1:
                raise ParseError("exponent must be an integer constant", t[2])
            return BinOp("^", base, Num(k, exponent.pos), t[2])
        return base

    def primary(self):
        t = self.take()
        kind, value, pos = t
        if kind == "num":
            return Num(Fraction(value), pos)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if value not in FUNCTIONS:
                    raise ParseError(f"unknown function {value!r}", pos)
                self.take()
                arg = self.expr()
                self.expect(")")
                if value == "moebius" and _constant_value(arg, self.params) is None:
                    raise ParseError("moebius() takes a constant argument", pos)
                return Call(value, arg, pos)
            if value == "z":
                return Var(pos)
            if value in self.params:
                return Param(value, pos)
            if value in GERMS:
                return Germ(value, pos)
            raise ParseError(f"unknown identifier {value!r}", pos)
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {value!r}", pos)


def _constant_value(node, params) -> Fraction | None:
    """Value of a z-free arithmetic subtree, or None."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Param):
        return Fraction(params[node.name])
    if isinstance(node, Neg):
        v = _constant_value(node.arg, params)
        return None if v is None else -v
    if isinstance(node, BinOp):
        a = _constant_value(node.left, params)
        b = _constant_value(node.right, params)
        if a is None or b is None:
            return None
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return None if b == 0 else a / b
        if node.op == "^":
            return a ** int(b) if (a or b >= 0) else None
    return None


def parse(text: str, params: Mapping[str, object] | None = None):
    """Parse expression text into an AST; parameters must be bound up front."""
    params = {k: Fraction(v) for k, v in (params or {}).items()}
    bad = [k for k in params if k == "z" or k in GERMS or k in FUNCTIONS]
    if bad:
        raise ParseError(f"parameter name {bad[0]!r} shadows a builtin")
    p = _Parser(text, params)
    node = p.expr()
    t = p.peek()
    if t[0] != "end":
        raise ParseError(f"unexpected token {t[1]!r}", t[2])
    return node


def normalized(node) -> str:
    """Canonical fully parenthesized text of an AST (positions dropped)."""
    return str(node)


# ---------------------------------------------------------------------------
# exact evaluation


def _germ_series(name, n):
    z = PowerSeries.variable(n)
    if name == "expm1":
        return exp_series(z) - 1
    if name == "sin":
        return sin_series(z)
    if name == "zexp":
        return z * exp_series(z)
    if name == "quadratic":
        return z + z * z
    raise KeyError(name)


def _eval_series(node, n, params):
    try:
        if isinstance(node, Num):
            return PowerSeries.constant(node.value, n)
        if isinstance(node, Var):
            return PowerSeries.variable(n)
        if isinstance(node, Param):
            return PowerSeries.constant(Fraction(params[node.name]), n)
        if isinstance(node, Germ):
            return _germ_series(node.name, n)
        if isinstance(node, Neg):
            return -_eval_series(node.arg, n, params)
        if isinstance(node, BinOp):
            a = _eval_series(node.left, n, params)
            if node.op == "^":
                return a ** int(node.right.value)
            b = _eval_series(node.right, n, params)
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            return a / b
        if isinstance(node, Call):
            if node.name == "moebius":
                c = _constant_value(node.arg, params)
                z = PowerSeries.variable(n)
                return z / (1 - z * c)
            a = _eval_series(node.arg, n, params)
            if node.name == "exp":
                return exp_series(a)
            if node.name == "expm1":
                return exp_series(a) - 1
            if node.name == "log":
                return log_series(a)
            if node.name == "sin":
                return sin_series(a)
    except EvaluationError:
        raise
    except SeriesError as exc:
        raise EvaluationError(str(exc), getattr(node, "pos", None)) from exc
    raise TypeError(f"not an expression node: {node!r}")


def eval_expression(node, order: int, params: Mapping[str, object] | None = None) -> PowerSeries:
    """Exact series of an expression, truncated at ``order``.

    Quotients can lose a few orders (e.g. ``(exp(z)-1)/z``); the working
    order is raised until the result is known to ``order``.
    """
    params = {k: Fraction(v) for k, v in (params or {}).items()}
    work = order
    for _ in range(6):
        s = _eval_series(node, work, params)
        if s.order >= order:
            return s.truncate(order)
        work += order - s.order
    return s


# ---------------------------------------------------------------------------
# numeric evaluation


def _eval_complex(node, z, params):
    if isinstance(node, Num):
        return complex(node.value)
    if isinstance(node, Var):
        return z
    if isinstance(node, Param):
        return complex(params[node.name])
    if isinstance(node, Germ):
        if node.name == "expm1":
            return cexpm1(z)
        if node.name == "sin":
            return cmath.sin(z)
        if node.name == "zexp":
            return z * cmath.exp(z)
        return z + z * z
    if isinstance(node, Neg):
        return -_eval_complex(node.arg, z, params)
    if isinstance(node, BinOp):
        a = _eval_complex(node.left, z, params)
        if node.op == "^":
            return a ** int(node.right.value)
        b = _eval_complex(node.right, z, params)
        return {"+": a + b, "-": a - b, "*": a * b}[node.op] if node.op != "/" else a / b
    if isinstance(node, Call):
        if node.name == "moebius":
            c = complex(_constant_value(node.arg, params))
            return z / (1 - c * z)
        a = _eval_complex(node.arg, z, params)
        if node.name == "exp":
            return cmath.exp(a)
        if node.name == "expm1":
            return cexpm1(a)
        if node.name == "log":
            return cmath.log(a)
        if node.name == "sin":
            return cmath.sin(a)
    raise TypeError(f"not an expression node: {node!r}")


def _eval_jet(node, s: PowerSeries, params):
    n = s.order
    if isinstance(node, Num):
        return PowerSeries.constant(complex(node.value), n, exact=False)
    if isinstance(node, Var):
        return s
    if isinstance(node, Param):
        return PowerSeries.constant(complex(params[node.name]), n, exact=False)
    if isinstance(node, Germ):
        if node.name == "expm1":
            return jet_expm1(s)
        if node.name == "sin":
            return jet_sin(s)
        if node.name == "zexp":
            return s * jet_exp(s)
        return s + s * s
    if isinstance(node, Neg):
        return -_eval_jet(node.arg, s, params)
    if isinstance(node, BinOp):
        a = _eval_jet(node.left, s, params)
        if node.op == "^":
            return a ** int(node.right.value)
        b = _eval_jet(node.right, s, params)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    if isinstance(node, Call):
        if node.name == "moebius":
            c = complex(_constant_value(node.arg, params))
            return s / (1 - s * c)
        a = _eval_jet(node.arg, s, params)
        if node.name == "exp":
            return jet_exp(a)
        if node.name == "expm1":
            return jet_expm1(a)
        if node.name == "log":
            return jet_log(a)
        if node.name == "sin":
            return jet_sin(a)
    raise TypeError(f"not an expression node: {node!r}")


class ExpressionMap(EvaluableMap):
    """A parsed expression viewed as a holomorphic map for numeric work."""

    def __init__(self, node, params: Mapping[str, object] | None = None, text: str | None = None):
        self.node = node
        self.params = {k: Fraction(v) for k, v in (params or {}).items()}
        self.text = text if text is not None else normalized(node)

    @classmethod
    def from_text(cls, text: str, params=None) -> ExpressionMap:
        return cls(parse(text, params), params, text)

    def __call__(self, z: complex) -> complex:
        return _eval_complex(self.node, complex(z), self.params)

    def jet(self, s: PowerSeries) -> PowerSeries:
        return _eval_jet(self.node, s, self.params)

    def __repr__(self):
        return f"ExpressionMap({self.text!r})"
