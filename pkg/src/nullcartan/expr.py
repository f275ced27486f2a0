"""Expression parsing and truncated-Taylor (jet) arithmetic.

Curve components are written in a small expression language, e.g.
``(s - s^5)/(4*sqrt(15))``.  Evaluation propagates truncated Taylor series
("jets") through the expression tree, so derivatives up to any requested
order come out exact to rounding instead of degrading the way finite
differences do.  A jet stores the coefficients ``c_k = f^(k)(base)/k!``.

Grammar (``^`` takes a literal integer exponent and binds tighter than unary
minus; ``sqrt`` covers half powers)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | atom ('^' integer)?
    atom   := number | parameter | func '(' expr ')' | '(' expr ')'
    func   := sqrt | sin | cos | exp | log
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ExprEvaluationError, ExprSyntaxError

__all__ = [
    "Jet",
    "VecJet",
    "Expr",
    "parse",
    "jet_eval",
    "derivative",
    "jet_compose",
    "jet_invert",
]


# ---------------------------------------------------------------------------
# Jets
# ---------------------------------------------------------------------------

def _as_coeffs(x, order):
    c = np.zeros(order + 1)
    c[0] = float(x)
    return c


@dataclass(frozen=True, eq=False)
class Jet:
    """Truncated Taylor expansion of a scalar function at ``base``.

    ``coeffs[k]`` is ``f^(k)(base)/k!``.  Arithmetic between two jets
    requires a common base point and truncates to the shorter order.
    """

    base: float
    coeffs: np.ndarray

    @classmethod
    def variable(cls, base, order):
        c = np.zeros(order + 1)
        c[0] = float(base)
        if order >= 1:
            c[1] = 1.0
        return cls(float(base), c)

    @classmethod
    def constant(cls, value, base, order):
        return cls(float(base), _as_coeffs(value, order))

    @property
    def order(self):
        return len(self.coeffs) - 1

    @property
    def value(self):
        return float(self.coeffs[0])

    def derivative(self, k):
        """k-th derivative value at the base point, ``k! * coeffs[k]``."""
        if not 0 <= k <= self.order:
            raise ValueError(f"derivative order {k} outside jet order {self.order}")
        return math.factorial(k) * float(self.coeffs[k])

    def differentiate(self):
        """Jet of f' at the same base, one order lower."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        k = np.arange(1, self.order + 1)
        return Jet(self.base, self.coeffs[1:] * k)

    def antiderivative(self, constant):
        """Jet of the antiderivative with value ``constant`` at the base."""
        k = np.arange(1, self.order + 2)
        c = np.concatenate(([float(constant)], self.coeffs / k))
        return Jet(self.base, c)

    def truncate(self, order):
        if order >= self.order:
            return self
        return Jet(self.base, self.coeffs[: order + 1])

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.base != self.base:
                raise ValueError("jet bases differ")
            return other
        return Jet.constant(other, self.base, self.order)

    def _pair(self, other):
        other = self._coerce(other)
        K = min(self.order, other.order)
        return self.coeffs[: K + 1], other.coeffs[: K + 1], K

    def __add__(self, other):
        a, b, _ = self._pair(other)
        return Jet(self.base, a + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b, _ = self._pair(other)
        return Jet(self.base, a - b)

    def __rsub__(self, other):
        a, b, _ = self._pair(other)
        return Jet(self.base, b - a)

    def __neg__(self):
        return Jet(self.base, -self.coeffs)

    def __mul__(self, other):
        a, b, K = self._pair(other)
        return Jet(self.base, np.convolve(a, b)[: K + 1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b, K = self._pair(other)
        if b[0] == 0.0:
            raise ZeroDivisionError("division by a jet with zero constant term")
        h = np.zeros(K + 1)
        for k in range(K + 1):
            acc = a[k]
            if k:
                acc -= np.dot(h[:k], b[k:0:-1])
            h[k] = acc / b[0]
        return Jet(self.base, h)

    def __rtruediv__(self, other):
        return self._coerce(other).__truediv__(self)

    def __pow__(self, p):
        if not isinstance(p, (int, np.integer)):
            raise TypeError("jet powers take integer exponents only")
        if p < 0:
            return (1.0 / self) ** (-p)
        result = Jet.constant(1.0, self.base, self.order)
        square = self
        p = int(p)
        while p:
            if p & 1:
                result = result * square
            p >>= 1
            if p:
                square = square * square
        return result

    # -- elementary functions ------------------------------------------------

    def sqrt(self):
        f = self.coeffs
        if f[0] <= 0.0:
            raise ValueError("sqrt of a jet with nonpositive constant term")
        h = np.zeros_like(f)
        h[0] = math.sqrt(f[0])
        for k in range(1, len(f)):
            acc = f[k]
            if k >= 2:
                acc -= np.dot(h[1:k], h[k - 1:0:-1])
            h[k] = acc / (2.0 * h[0])
        return Jet(self.base, h)

    def exp(self):
        f = self.coeffs
        h = np.zeros_like(f)
        h[0] = math.exp(f[0])
        for k in range(1, len(f)):
            j = np.arange(1, k + 1)
            h[k] = np.dot(j * f[1: k + 1], h[k - 1::-1][: k]) / k
        return Jet(self.base, h)

    def log(self):
        f = self.coeffs
        if f[0] <= 0.0:
            raise ValueError("log of a jet with nonpositive constant term")
        h = np.zeros_like(f)
        h[0] = math.log(f[0])
        for k in range(1, len(f)):
            acc = f[k]
            if k >= 2:
                j = np.arange(1, k)
                acc -= np.dot(j * h[1:k], f[k - 1:0:-1]) / k
            h[k] = acc / f[0]
        return Jet(self.base, h)

    def _sincos(self):
        f = self.coeffs
        s = np.zeros_like(f)
        c = np.zeros_like(f)
        s[0], c[0] = math.sin(f[0]), math.cos(f[0])
        for k in range(1, len(f)):
            j = np.arange(1, k + 1)
            fj = j * f[1: k + 1]
            s[k] = np.dot(fj, c[k - 1::-1][: k]) / k
            c[k] = -np.dot(fj, s[k - 1::-1][: k]) / k
        return Jet(self.base, s), Jet(self.base, c)

    def sin(self):
        return self._sincos()[0]

    def cos(self):
        return self._sincos()[1]


def derivative(jet, k):
    """k-th derivative encoded by a jet; rejects k outside the jet order."""
    return jet.derivative(k)


def jet_compose(outer, inner):
    """Jet of ``outer o inner`` at ``inner.base``.

    ``inner.value`` must equal ``outer.base`` (the expansion points line up).
    Evaluated by Horner's scheme on the truncated series.
    """
    if not math.isclose(inner.value, outer.base, rel_tol=0.0, abs_tol=1e-9 * (1 + abs(outer.base))):
        raise ValueError("composition base mismatch")
    K = min(outer.order, inner.order)
    shifted_coeffs = inner.coeffs[: K + 1].copy()
    shifted_coeffs[0] = 0.0
    shifted = Jet(inner.base, shifted_coeffs)
    result = Jet.constant(outer.coeffs[K], inner.base, K)
    for k in range(K - 1, -1, -1):
        result = result * shifted + float(outer.coeffs[k])
    return result


def jet_invert(phi):
    """Inverse series of a jet with nonvanishing first coefficient.

    Given the jet of a map ``phi`` at ``s0``, returns the jet of the inverse
    map at ``phi(s0)``; its value is ``s0``.  Solved order by order from
    ``phi(psi(v)) = v``.
    """
    b = phi.coeffs
    K = phi.order
    if K < 1 or b[1] == 0.0:
        raise ValueError("inverse series needs a nonzero first-order coefficient")
    c = np.zeros(K + 1)
    c[0] = phi.base
    c[1] = 1.0 / b[1]
    for m in range(2, K + 1):
        # residual at order m from the k >= 2 part of phi, using c_{<m}
        d = np.zeros(m + 1)
        d[1:m] = c[1:m]
        power = d.copy()
        acc = 0.0
        for k in range(2, m + 1):
            power = np.convolve(power, d)[: m + 1]
            acc += b[k] * power[m]
        c[m] = -acc / b[1]
    return Jet(phi.value, c)


# ---------------------------------------------------------------------------
# Vector jets
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class VecJet:
    """Truncated Taylor expansion of a vector-valued function.

    ``coeffs[k]`` is the vector ``F^(k)(base)/k!``; row 0 is the value.
    """

    base: float
    coeffs: np.ndarray  # shape (order + 1, dim)

    @classmethod
    def from_derivatives(cls, base, value, derivs):
        rows = [np.asarray(value, dtype=float)]
        for k, d in enumerate(derivs, start=1):
            rows.append(np.asarray(d, dtype=float) / math.factorial(k))
        return cls(float(base), np.stack(rows))

    @classmethod
    def from_jets(cls, jets):
        K = min(j.order for j in jets)
        cols = [j.coeffs[: K + 1] for j in jets]
        return cls(jets[0].base, np.stack(cols, axis=1))

    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    @property
    def dim(self):
        return self.coeffs.shape[1]

    @property
    def value(self):
        return self.coeffs[0].copy()

    def derivative_value(self, k):
        return math.factorial(k) * self.coeffs[k]

    def component(self, i):
        return Jet(self.base, self.coeffs[:, i].copy())

    def differentiate(self):
        k = np.arange(1, self.order + 1)[:, None]
        return VecJet(self.base, self.coeffs[1:] * k)

    def truncate(self, order):
        if order >= self.order:
            return self
        return VecJet(self.base, self.coeffs[: order + 1])

    def _pair(self, other):
        K = min(self.order, other.order)
        return self.coeffs[: K + 1], other.coeffs[: K + 1]

    def __add__(self, other):
        a, b = self._pair(other)
        return VecJet(self.base, a + b)

    def __sub__(self, other):
        a, b = self._pair(other)
        return VecJet(self.base, a - b)

    def __neg__(self):
        return VecJet(self.base, -self.coeffs)

    def scale(self, s):
        """Multiply by a scalar jet (or plain number) coefficientwise."""
        if not isinstance(s, Jet):
            return VecJet(self.base, float(s) * self.coeffs)
        K = min(self.order, s.order)
        out = np.zeros((K + 1, self.dim))
        for k in range(K + 1):
            out[k] = s.coeffs[: k + 1][::-1] @ self.coeffs[: k + 1]
        return VecJet(self.base, out)

    def weighted_inner(self, other, weights):
        """Jet of ``sum_i weights[i] * self_i(t) * other_i(t)``."""
        a, b = self._pair(other)
        wb = b * np.asarray(weights)
        K = a.shape[0] - 1
        out = np.zeros(K + 1)
        for k in range(K + 1):
            out[k] = np.sum(a[: k + 1][::-1] * wb[: k + 1])
        return Jet(self.base, out)


# ---------------------------------------------------------------------------
# Expression AST
# ---------------------------------------------------------------------------

class Expr:
    """Base class for expression nodes; see module docstring for the grammar."""

    def evaluate(self, param):
        raise NotImplementedError

    def substitute(self, replacement):
        """Replace every parameter occurrence with another expression."""
        raise NotImplementedError

    def __str__(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Num(Expr):
    value: float

    def evaluate(self, param):
        return Jet.constant(self.value, param.base, param.order)

    def substitute(self, replacement):
        return self

    def __str__(self):
        return f"{self.value:g}"


@dataclass(frozen=True)
class Param(Expr):
    name: str

    def evaluate(self, param):
        return param

    def substitute(self, replacement):
        return replacement

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    def evaluate(self, param):
        return -self.arg.evaluate(param)

    def substitute(self, replacement):
        return Neg(self.arg.substitute(replacement))

    def __str__(self):
        return f"-({self.arg})"


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr

    def evaluate(self, param):
        a = self.left.evaluate(param)
        b = self.right.evaluate(param)
        try:
            if self.op == "+":
                return a + b
            if self.op == "-":
                return a - b
            if self.op == "*":
                return a * b
            return a / b
        except ZeroDivisionError as exc:
            raise ExprEvaluationError(str(exc), str(self)) from None

    def substitute(self, replacement):
        return BinOp(self.op, self.left.substitute(replacement),
                     self.right.substitute(replacement))

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class IntPow(Expr):
    arg: Expr
    exponent: int

    def evaluate(self, param):
        try:
            return self.arg.evaluate(param) ** self.exponent
        except ZeroDivisionError as exc:
            raise ExprEvaluationError(str(exc), str(self)) from None

    def substitute(self, replacement):
        return IntPow(self.arg.substitute(replacement), self.exponent)

    def __str__(self):
        return f"({self.arg})^{self.exponent}"


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr

    def evaluate(self, param):
        inner = self.arg.evaluate(param)
        try:
            return getattr(inner, self.func)()
        except ValueError as exc:
            raise ExprEvaluationError(str(exc), str(self)) from None

    def substitute(self, replacement):
        return Call(self.func, self.arg.substitute(replacement))

    def __str__(self):
        return f"{self.func}({self.arg})"


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_FUNCS = ("sqrt", "sin", "cos", "exp", "log")

_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "name" | "op" | "end"
    text: str
    pos: int


def _tokenize(text):
    tokens = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[i]!r}", i)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(), i))
        i = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, parameter):
        self.tokens = tokens
        self.parameter = parameter
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        self.i += 1

    def expect_op(self, text):
        if self.tok.kind != "op" or self.tok.text != text:
            raise ExprSyntaxError(f"expected '{text}'", self.tok.pos)
        self.advance()

    def parse_expr(self):
        node = self.parse_term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.advance()
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self):
        node = self.parse_factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.advance()
            node = BinOp(op, node, self.parse_factor())
        return node

    def parse_factor(self):
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.parse_factor())
        node = self.parse_atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            node = IntPow(node, self.parse_int_exponent())
        return node

    def parse_int_exponent(self):
        sign = 1
        if self.tok.kind == "op" and self.tok.text == "-":
            sign = -1
            self.advance()
        tok = self.tok
        if tok.kind != "num" or not tok.text.isdigit():
            raise ExprSyntaxError("power exponents must be literal integers", tok.pos)
        self.advance()
        return sign * int(tok.text)

    def parse_atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            try:
                return Num(float(tok.text))
            except ValueError:
                raise ExprSyntaxError(f"malformed number {tok.text!r}", tok.pos) from None
        if tok.kind == "name":
            self.advance()
            if tok.text in _FUNCS:
                self.expect_op("(")
                arg = self.parse_expr()
                self.expect_op(")")
                return Call(tok.text, arg)
            if tok.text == self.parameter:
                return Param(tok.text)
            raise ExprSyntaxError(f"unknown identifier {tok.text!r}", tok.pos)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(f"unexpected token {tok.text!r}" if tok.text else "unexpected end of input",
                              tok.pos)


def parse(text, parameter="s"):
    """Parse expression text into an AST; raises ExprSyntaxError with column."""
    parser = _Parser(_tokenize(text), parameter)
    node = parser.parse_expr()
    if parser.tok.kind != "end":
        raise ExprSyntaxError(f"unexpected token {parser.tok.text!r}", parser.tok.pos)
    return node


def jet_eval(expr, base, order):
    """Evaluate an expression as a jet of the given order at ``base``."""
    if order < 0:
        raise ValueError("jet order must be nonnegative")
    return expr.evaluate(Jet.variable(base, order))
