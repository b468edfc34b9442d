"""Parser and evaluators for component expressions.

Grammar (whitespace ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" INTEGER)?
    atom   := NUMBER | VAR | FUNC "(" expr ")" | "(" expr ")"

VAR is x1, x2, ...; FUNC is sin, cos or exp; NUMBER is an integer or a
decimal, and "p/q" is read as a division of literals. Division is only
allowed by a constant subexpression.
"""
from __future__ import annotations

import re
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from ..errors import ExpressionSyntaxError, UnknownFunction
from .polynomial import Polynomial

FUNCTIONS = ("sin", "cos", "exp")

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Var:
    index: int  # 0-based


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or a function name
    arg: object


@dataclass(frozen=True)
class Binary:
    op: str  # + - * /
    left: object
    right: object


@dataclass(frozen=True)
class Power:
    base: object
    exponent: int


def _tokenize(src: str):
    pos = 0
    toks = []
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            break
        if m.group(1) is not None:
            toks.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            toks.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    toks.append(("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str, n: int | None):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0
        self.n = n
        self.max_var = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ExpressionSyntaxError(msg, self.src, tok[2])

    def expect(self, op):
        t = self.peek()
        if t[0] != "op" or t[1] != op:
            self.fail(f"expected '{op}'")
        return self.take()

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected '{self.peek()[1]}'")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            tok = self.take()
            right = self.unary()
            if tok[1] == "/":
                val = _constant_value(right)
                if val is None:
                    self.fail("division only by constants", tok)
                if val == 0:
                    self.fail("division by zero", tok)
            node = Binary(tok[1], node, right)
        return node

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            return Unary("-", self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            t = self.peek()
            if t[0] != "num" or "." in t[1]:
                self.fail("exponent must be a nonnegative integer")
            self.take()
            return Power(base, int(t[1]))
        return base

    def atom(self):
        t = self.peek()
        if t[0] == "num":
            self.take()
            return Num(Fraction(t[1]))
        if t[0] == "name":
            self.take()
            name = t[1]
            m = re.fullmatch(r"x([1-9]\d*)", name)
            if m:
                k = int(m.group(1))
                if self.n is not None and k > self.n:
                    self.fail(f"variable {name} exceeds n={self.n}", t)
                self.max_var = max(self.max_var, k)
                return Var(k - 1)
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                if name not in FUNCTIONS:
                    raise UnknownFunction(f"unknown function '{name}' at offset {t[2]}")
                self.take()
                arg = self.expr()
                self.expect(")")
                return Unary(name, arg)
            self.fail(f"unknown identifier '{name}'", t)
        if t[0] == "op" and t[1] == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if t[0] == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected '{t[1]}'")


def _constant_value(node) -> Fraction | None:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Unary) and node.op == "-":
        v = _constant_value(node.arg)
        return None if v is None else -v
    if isinstance(node, Binary):
        a, b = _constant_value(node.left), _constant_value(node.right)
        if a is None or b is None:
            return None
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    if isinstance(node, Power):
        v = _constant_value(node.base)
        return None if v is None else v ** node.exponent
    return None


def parse_ast(src: str, n: int | None = None):
    p = _Parser(src, n)
    node = p.parse()
    return node, p.max_var


def is_polynomial(node) -> bool:
    if isinstance(node, (Num, Var)):
        return True
    if isinstance(node, Unary):
        return node.op == "-" and is_polynomial(node.arg)
    if isinstance(node, Binary):
        return is_polynomial(node.left) and is_polynomial(node.right)
    if isinstance(node, Power):
        return is_polynomial(node.base)
    return False


def to_polynomial(node, n: int) -> Polynomial:
    if isinstance(node, Num):
        return Polynomial.constant(n, node.value)
    if isinstance(node, Var):
        return Polynomial.variable(n, node.index)
    if isinstance(node, Unary):
        return -to_polynomial(node.arg, n)
    if isinstance(node, Power):
        return to_polynomial(node.base, n) ** node.exponent
    a, b = to_polynomial(node.left, n), to_polynomial(node.right, n)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    return a.scale(1 / _constant_value(node.right))


def canonical(node) -> str:
    """Stable fully parenthesized text form."""
    if isinstance(node, Num):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, Var):
        return f"x{node.index + 1}"
    if isinstance(node, Unary):
        return f"-({canonical(node.arg)})" if node.op == "-" else f"{node.op}({canonical(node.arg)})"
    if isinstance(node, Power):
        return f"({canonical(node.base)})^{node.exponent}"
    return f"({canonical(node.left)} {node.op} {canonical(node.right)})"


# --- numeric evaluation ----------------------------------------------------------

def eval_numpy(node, x: np.ndarray) -> np.ndarray:
    """Vectorized float evaluation; x has shape (m, n)."""
    if isinstance(node, Num):
        return np.full(x.shape[0], float(node.value))
    if isinstance(node, Var):
        return x[:, node.index]
    if isinstance(node, Unary):
        a = eval_numpy(node.arg, x)
        if node.op == "-":
            return -a
        return {"sin": np.sin, "cos": np.cos, "exp": np.exp}[node.op](a)
    if isinstance(node, Power):
        return eval_numpy(node.base, x) ** node.exponent
    a, b = eval_numpy(node.left, x), eval_numpy(node.right, x)
    return {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide}[node.op](a, b)


@contextmanager
def iv_precision(bits: int = 120):
    """Temporarily raise the working precision of mpmath interval arithmetic."""
    old = mpmath.iv.prec
    mpmath.iv.prec = bits
    try:
        yield
    finally:
        mpmath.iv.prec = old


def _iv(v):
    if isinstance(v, Fraction):
        return mpmath.iv.mpf(v.numerator) / mpmath.iv.mpf(v.denominator)
    return v


def eval_interval(node, x, prec: int = 120):
    """Rigorous interval enclosure at a rational point (mpmath iv)."""
    with iv_precision(prec):
        return _eval_iv(node, [_iv(Fraction(v)) for v in x])


def _eval_iv(node, x):
    iv = mpmath.iv
    if isinstance(node, Num):
        return _iv(node.value)
    if isinstance(node, Var):
        return x[node.index]
    if isinstance(node, Unary):
        a = _eval_iv(node.arg, x)
        if node.op == "-":
            return -a
        return {"sin": iv.sin, "cos": iv.cos, "exp": iv.exp}[node.op](a)
    if isinstance(node, Power):
        return _eval_iv(node.base, x) ** node.exponent
    a, b = _eval_iv(node.left, x), _eval_iv(node.right, x)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    return a / b


# --- order-2 Taylor-mode forward differentiation ------------------------------------

def _is_exact(v) -> bool:
    return isinstance(v, Fraction)


def _mix(a, b):
    if _is_exact(a) and _is_exact(b):
        return a, b
    return _iv(a), _iv(b)


def _add(a, b):
    a, b = _mix(a, b)
    return a + b


def _mul(a, b):
    if _is_exact(a) and a == 0 or _is_exact(b) and b == 0:
        return Fraction(0)
    a, b = _mix(a, b)
    return a * b


class Taylor2:
    """Value, gradient and Hessian of a scalar at a point.

    Entries are Fractions when exact, mpmath intervals otherwise.
    """

    __slots__ = ("val", "grad", "hess")

    def __init__(self, val, grad, hess):
        self.val = val
        self.grad = grad
        self.hess = hess

    @staticmethod
    def const(n, c):
        z = Fraction(0)
        return Taylor2(c, [z] * n, [[z] * n for _ in range(n)])

    @staticmethod
    def var(n, i, x0):
        t = Taylor2.const(n, Fraction(x0))
        t.grad[i] = Fraction(1)
        return t

    def add(self, o, sign=1):
        n = len(self.grad)
        s = Fraction(sign)
        return Taylor2(_add(self.val, _mul(s, o.val)),
                       [_add(self.grad[i], _mul(s, o.grad[i])) for i in range(n)],
                       [[_add(self.hess[i][j], _mul(s, o.hess[i][j])) for j in range(n)] for i in range(n)])

    def mul(self, o):
        n = len(self.grad)
        val = _mul(self.val, o.val)
        grad = [_add(_mul(self.val, o.grad[i]), _mul(o.val, self.grad[i])) for i in range(n)]
        hess = [[_add(_add(_mul(self.val, o.hess[i][j]), _mul(o.val, self.hess[i][j])),
                      _add(_mul(self.grad[i], o.grad[j]), _mul(self.grad[j], o.grad[i])))
                 for j in range(n)] for i in range(n)]
        return Taylor2(val, grad, hess)

    def chain(self, f0, f1, f2):
        """Compose with a scalar function g given g(v), g'(v), g''(v)."""
        n = len(self.grad)
        grad = [_mul(f1, g) for g in self.grad]
        hess = [[_add(_mul(f1, self.hess[i][j]), _mul(f2, _mul(self.grad[i], self.grad[j])))
                 for j in range(n)] for i in range(n)]
        return Taylor2(f0, grad, hess)


def _elementary(name, v):
    """(g(v), g'(v), g''(v)) exactly at v = 0, as intervals otherwise."""
    if _is_exact(v) and v == 0:
        one, zero = Fraction(1), Fraction(0)
        return {"sin": (zero, one, zero), "cos": (one, zero, -one), "exp": (one, one, one)}[name]
    x = _iv(v)
    iv = mpmath.iv
    with iv_precision(120):
        s, c, e = iv.sin(x), iv.cos(x), iv.exp(x)
    return {"sin": (s, c, -s), "cos": (c, -s, -c), "exp": (e, e, e)}[name]


def taylor2(node, x0) -> Taylor2:
    n = len(x0)
    x0 = [Fraction(v) for v in x0]
    with iv_precision(120):
        return _t2(node, x0, n)


def _t2(node, x0, n):
    if isinstance(node, Num):
        return Taylor2.const(n, node.value)
    if isinstance(node, Var):
        return Taylor2.var(n, node.index, x0[node.index])
    if isinstance(node, Unary):
        a = _t2(node.arg, x0, n)
        if node.op == "-":
            return Taylor2.const(n, Fraction(0)).add(a, -1)
        return a.chain(*_elementary(node.op, a.val))
    if isinstance(node, Power):
        a = _t2(node.base, x0, n)
        k = node.exponent
        if k == 0:
            return Taylor2.const(n, Fraction(1))
        v = a.val

        def pw(e):
            if e < 0:
                return Fraction(0)
            if _is_exact(v):
                return v ** e
            return _iv(v) ** e

        return a.chain(pw(k), _mul(Fraction(k), pw(k - 1)), _mul(Fraction(k * (k - 1)), pw(k - 2)))
    a, b = _t2(node.left, x0, n), _t2(node.right, x0, n)
    if node.op == "+":
        return a.add(b)
    if node.op == "-":
        return a.add(b, -1)
    if node.op == "*":
        return a.mul(b)
    return a.mul(Taylor2.const(n, 1 / _constant_value(node.right)))


def interval_mid(v) -> float:
    if _is_exact(v):
        return float(v)
    return float(v.mid)


def interval_rad(v) -> float:
    if _is_exact(v):
        return 0.0
    return float(v.delta) / 2
