"""Expression parsing and truncated multivariate Taylor arithmetic.

Charts are declared as elementary expressions in named variables. This module
turns an expression string into a small AST and evaluates it to a `JetValue`:
a dense truncated Taylor expansion at a base point, storing normalized
coefficients c_alpha = d^alpha F / alpha! for all multi-indices with
|alpha| <= order. Order 5 suffices for every downstream quantity (the
bitension field consumes three derivatives of the mean curvature, which
itself consumes two derivatives of the immersion).

Grammar (no implicit multiplication, '^' takes a constant exponent and does
not chain):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := unary ('^' constant)?
    unary  := '-' unary | primary
    primary:= NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

`pi` and `e` fold to literals at parse time. Supported functions (unary):
sin cos tan cot exp log sqrt asin acos atan sinh cosh tanh.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

import numpy as np

__all__ = [
    "ExpressionError",
    "DomainError",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Pow",
    "Call",
    "ExprAst",
    "parse_expression",
    "to_source",
    "shift_variables",
    "JetValue",
    "EvalContext",
    "eval_jet",
    "extract_partial",
    "FUNCTIONS",
]

FUNCTIONS = (
    "sin", "cos", "tan", "cot", "exp", "log", "sqrt",
    "asin", "acos", "atan", "sinh", "cosh", "tanh",
)

_CONSTANTS = {"pi": math.pi, "e": math.e}


class ExpressionError(ValueError):
    """Parse-time failure; `offset` is the byte offset into the source."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class DomainError(ValueError):
    """Evaluation left the domain of an elementary function."""


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "ExprAst"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "ExprAst"
    right: "ExprAst"


@dataclass(frozen=True)
class Pow:
    base: "ExprAst"
    exponent: float


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "ExprAst"


ExprAst = Union[Num, Var, Neg, BinOp, Pow, Call]


# ---------------------------------------------------------------------------
# Tokenizer


@dataclass(frozen=True)
class _Token:
    kind: str  # NUMBER IDENT OP END
    text: str
    offset: int


_OPS = set("+-*/^()")


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPS:
            tokens.append(_Token("OP", ch, i))
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == ".":
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            # exponent part only when followed by digits (else 'e' is an ident)
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            tokens.append(_Token("NUMBER", source[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(_Token("IDENT", source[i:j], i))
            i = j
            continue
        raise ExpressionError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("END", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, source: str, variables: tuple[str, ...]):
        self.source = source
        self.tokens = _tokenize(source)
        self.pos = 0
        self.variables = {name: i for i, name in enumerate(variables)}

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> _Token:
        tok = self.peek()
        if tok.kind != "OP" or tok.text != op:
            raise ExpressionError(f"expected {op!r}", tok.offset)
        return self.advance()

    def parse(self) -> ExprAst:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "END":
            raise ExpressionError(f"unexpected token {tok.text!r}", tok.offset)
        return node

    def expr(self) -> ExprAst:
        node = self.term()
        while self.peek().kind == "OP" and self.peek().text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> ExprAst:
        node = self.factor()
        while self.peek().kind == "OP" and self.peek().text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> ExprAst:
        node = self.unary()
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "^":
            self.advance()
            exp_tok = self.peek()
            exp_node = self.unary()
            value = _fold_constant(exp_node)
            if value is None:
                raise ExpressionError("exponent must be a constant", exp_tok.offset)
            node = Pow(node, value)
        return node

    def unary(self) -> ExprAst:
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.primary()

    def primary(self) -> ExprAst:
        tok = self.advance()
        if tok.kind == "NUMBER":
            return Num(float(tok.text))
        if tok.kind == "IDENT":
            name = tok.text
            nxt = self.peek()
            if nxt.kind == "OP" and nxt.text == "(":
                if name not in FUNCTIONS:
                    raise ExpressionError(f"unknown function {name!r}", tok.offset)
                self.advance()
                inner = self.peek()
                if inner.kind == "OP" and inner.text == ")":
                    raise ExpressionError(
                        f"{name} takes exactly one argument", inner.offset)
                arg = self.expr()
                stop = self.peek()
                if stop.kind == "OP" and stop.text != ")":
                    raise ExpressionError(f"expected ')'", stop.offset)
                if stop.kind not in ("OP",):
                    raise ExpressionError(
                        f"{name} takes exactly one argument", stop.offset)
                self.expect_op(")")
                return Call(name, arg)
            if name in _CONSTANTS:
                return Num(_CONSTANTS[name])
            if name in self.variables:
                return Var(self.variables[name], name)
            raise ExpressionError(f"unknown identifier {name!r}", tok.offset)
        if tok.kind == "OP" and tok.text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExpressionError(
            f"unexpected token {tok.text!r}" if tok.kind != "END" else "unexpected end of input",
            tok.offset)


def _fold_constant(node: ExprAst) -> float | None:
    """Value of a variable-free subtree, else None."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return None
    if isinstance(node, Neg):
        v = _fold_constant(node.operand)
        return None if v is None else -v
    if isinstance(node, BinOp):
        a = _fold_constant(node.left)
        b = _fold_constant(node.right)
        if a is None or b is None:
            return None
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    if isinstance(node, Pow):
        v = _fold_constant(node.base)
        return None if v is None else v ** node.exponent
    if isinstance(node, Call):
        v = _fold_constant(node.arg)
        if v is None:
            return None
        fn = {"cot": lambda x: math.cos(x) / math.sin(x)}.get(
            node.fn, getattr(math, node.fn))
        return fn(v)
    raise TypeError(node)


def parse_expression(source: str, variables: tuple[str, ...] | list[str]) -> ExprAst:
    """Parse `source` over the given variable names; raises ExpressionError."""
    return _Parser(source, tuple(variables)).parse()


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_source(node: ExprAst) -> str:
    """Pretty-print with minimal parentheses; reparses to an equal AST."""
    def emit(n: ExprAst, parent_prec: int) -> str:
        if isinstance(n, Num):
            if n.value < 0:
                # negative literal only arises from folded constants
                return _paren(repr(n.value), parent_prec > 0)
            return repr(n.value)
        if isinstance(n, Var):
            return n.name
        if isinstance(n, Neg):
            inner = emit(n.operand, 3)
            return _paren(f"-{inner}", parent_prec > 2)
        if isinstance(n, BinOp):
            prec = _PRECEDENCE[n.op]
            left = emit(n.left, prec - 1)
            # right operand of - and / needs its own level to keep grouping
            right = emit(n.right, prec if n.op in "-/" else prec - 1)
            return _paren(f"{left} {n.op} {right}", parent_prec >= prec)
        if isinstance(n, Pow):
            base = emit(n.base, 4)
            exp = repr(n.exponent)
            if n.exponent < 0:
                exp = f"({exp})"
            return f"{base}^{exp}"
        if isinstance(n, Call):
            return f"{n.fn}({emit(n.arg, 0)})"
        raise TypeError(n)

    def _paren(text: str, needed: bool) -> str:
        return f"({text})" if needed else text

    return emit(node, 0)


def shift_variables(node: ExprAst, offset: int, names: tuple[str, ...]) -> ExprAst:
    """Reindex variables by `offset` into a new name tuple (chart rebasing)."""
    if isinstance(node, Num):
        return node
    if isinstance(node, Var):
        idx = node.index + offset
        return Var(idx, names[idx])
    if isinstance(node, Neg):
        return Neg(shift_variables(node.operand, offset, names))
    if isinstance(node, BinOp):
        return BinOp(node.op,
                     shift_variables(node.left, offset, names),
                     shift_variables(node.right, offset, names))
    if isinstance(node, Pow):
        return Pow(shift_variables(node.base, offset, names), node.exponent)
    if isinstance(node, Call):
        return Call(node.fn, shift_variables(node.arg, offset, names))
    raise TypeError(node)


# ---------------------------------------------------------------------------
# Multi-index bookkeeping (dense graded-lex layout, cached per (m, order))


@lru_cache(maxsize=None)
def _index_tables(m: int, order: int):
    indices: list[tuple[int, ...]] = []

    def gen(prefix: tuple[int, ...], remaining: int, budget: int):
        if remaining == 0:
            indices.append(prefix)
            return
        for d in range(budget + 1):
            gen(prefix + (d,), remaining - 1, budget - d)

    by_degree: list[list[tuple[int, ...]]] = [[] for _ in range(order + 1)]
    gen((), m, order)
    for alpha in indices:
        by_degree[sum(alpha)].append(alpha)
    ordered: list[tuple[int, ...]] = []
    for bucket in by_degree:
        ordered.extend(sorted(bucket))
    pos = {alpha: i for i, alpha in enumerate(ordered)}
    return ordered, pos


@lru_cache(maxsize=None)
def _mul_tables(m: int, order: int):
    ordered, pos = _index_tables(m, order)
    li, lj, lo = [], [], []
    for i, alpha in enumerate(ordered):
        da = sum(alpha)
        for j, beta in enumerate(ordered):
            if da + sum(beta) > order:
                continue
            li.append(i)
            lj.append(j)
            lo.append(pos[tuple(a + b for a, b in zip(alpha, beta))])
    return (np.asarray(li, dtype=np.intp),
            np.asarray(lj, dtype=np.intp),
            np.asarray(lo, dtype=np.intp))


@lru_cache(maxsize=None)
def _deriv_tables(m: int, order: int, var: int):
    """Maps an order-k jet to the order-(k-1) jet of its `var` partial."""
    ordered, pos = _index_tables(m, order)
    lowered, low_pos = _index_tables(m, order - 1)
    src, dst, fac = [], [], []
    for beta in lowered:
        alpha = tuple(b + (1 if i == var else 0) for i, b in enumerate(beta))
        src.append(pos[alpha])
        dst.append(low_pos[beta])
        fac.append(beta[var] + 1)
    return (np.asarray(src, dtype=np.intp),
            np.asarray(dst, dtype=np.intp),
            np.asarray(fac, dtype=np.float64))


# ---------------------------------------------------------------------------
# Univariate Taylor coefficient recurrences at a point


def _poly_mul(a: list[float], b: list[float], n: int) -> list[float]:
    out = [0.0] * (n + 1)
    for i, ai in enumerate(a):
        if i > n or ai == 0.0:
            continue
        for j, bj in enumerate(b):
            if i + j > n:
                break
            out[i + j] += ai * bj
    return out

def _poly_div(a: list[float], b: list[float], n: int) -> list[float]:
    if b[0] == 0.0:
        raise DomainError("division by zero constant term")
    out = [0.0] * (n + 1)
    for k in range(n + 1):
        acc = a[k] if k < len(a) else 0.0
        for j in range(k):
            acc -= out[j] * (b[k - j] if k - j < len(b) else 0.0)
        out[k] = acc / b[0]
    return out

def _poly_pow(s: list[float], a: float, n: int) -> list[float]:
    if s[0] <= 0.0:
        raise DomainError("fractional power of non-positive value")
    out = [0.0] * (n + 1)
    out[0] = s[0] ** a
    for k in range(1, n + 1):
        acc = 0.0
        for j in range(1, k + 1):
            sj = s[j] if j < len(s) else 0.0
            acc += (a * j - (k - j)) * sj * out[k - j]
        out[k] = acc / (k * s[0])
    return out


def _series(fn: str, c: float, n: int) -> list[float]:
    """Taylor coefficients a_j = fn^(j)(c)/j! for j = 0..n."""
    if fn == "exp":
        v = [math.exp(c)]
        for k in range(1, n + 1):
            v.append(v[k - 1] / k)
        return v
    if fn == "log":
        if c <= 0.0:
            raise DomainError("log of non-positive value")
        v = [math.log(c), 1.0 / c]
        for k in range(2, n + 1):
            v.append(-(k - 1) * v[k - 1] / (k * c))
        return v[: n + 1]
    if fn == "sqrt":
        if c <= 0.0:
            raise DomainError("sqrt of non-positive value")
        return _poly_pow([c, 1.0], 0.5, n)
    if fn in ("sin", "cos"):
        s, co = [math.sin(c)], [math.cos(c)]
        for k in range(1, n + 1):
            s.append(co[k - 1] / k)
            co.append(-s[k - 1] / k)
        return s if fn == "sin" else co
    if fn in ("sinh", "cosh"):
        s, co = [math.sinh(c)], [math.cosh(c)]
        for k in range(1, n + 1):
            s.append(co[k - 1] / k)
            co.append(s[k - 1] / k)
        return s if fn == "sinh" else co
    if fn == "tan":
        return _poly_div(_series("sin", c, n), _series("cos", c, n), n)
    if fn == "cot":
        return _poly_div(_series("cos", c, n), _series("sin", c, n), n)
    if fn == "tanh":
        return _poly_div(_series("sinh", c, n), _series("cosh", c, n), n)
    if fn == "atan":
        w = [1.0 + c * c, 2.0 * c, 1.0]
        g = _poly_div([1.0], w, max(n - 1, 0))
        v = [math.atan(c)]
        for k in range(1, n + 1):
            v.append(g[k - 1] / k)
        return v
    if fn in ("asin", "acos"):
        if abs(c) >= 1.0:
            raise DomainError(f"{fn} outside (-1, 1)")
        w = _poly_pow([1.0 - c * c, -2.0 * c, -1.0], 0.5, max(n - 1, 0))
        g = _poly_div([1.0], w, max(n - 1, 0))
        sign = 1.0 if fn == "asin" else -1.0
        v = [math.asin(c) if fn == "asin" else math.acos(c)]
        for k in range(1, n + 1):
            v.append(sign * g[k - 1] / k)
        return v
    raise ValueError(f"unknown function {fn!r}")


# ---------------------------------------------------------------------------
# JetValue


class JetValue:
    """Dense truncated Taylor expansion: coeffs[i] = d^alpha F / alpha!.

    Binary operations between jets of different orders truncate to the lower
    order; mixing dimensions is an error.
    """

    __slots__ = ("m", "order", "coeffs")

    def __init__(self, m: int, order: int, coeffs: np.ndarray):
        self.m = m
        self.order = order
        self.coeffs = coeffs

    # construction ----------------------------------------------------------

    @classmethod
    def constant(cls, value: float, m: int, order: int) -> "JetValue":
        ordered, _ = _index_tables(m, order)
        coeffs = np.zeros(len(ordered))
        coeffs[0] = value
        return cls(m, order, coeffs)

    @classmethod
    def variable(cls, index: int, value: float, m: int, order: int) -> "JetValue":
        if not 0 <= index < m:
            raise ValueError(f"variable index {index} out of range for dimension {m}")
        ordered, pos = _index_tables(m, order)
        coeffs = np.zeros(len(ordered))
        coeffs[0] = value
        if order >= 1:
            unit = tuple(1 if i == index else 0 for i in range(m))
            coeffs[pos[unit]] = 1.0
        return cls(m, order, coeffs)

    # helpers ----------------------------------------------------------------

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def truncate(self, order: int) -> "JetValue":
        if order == self.order:
            return self
        if order > self.order:
            raise ValueError("cannot extend a jet to higher order")
        ordered, _ = _index_tables(self.m, order)
        return JetValue(self.m, order, self.coeffs[: len(ordered)].copy())

    def _align(self, other: "JetValue") -> tuple["JetValue", "JetValue"]:
        if self.m != other.m:
            raise ValueError("jet dimensions differ")
        k = min(self.order, other.order)
        return self.truncate(k), other.truncate(k)

    def partial(self, alpha: tuple[int, ...]) -> float:
        """Raw partial derivative d^alpha F at the base point."""
        if len(alpha) != self.m:
            raise ValueError("multi-index length mismatch")
        if sum(alpha) > self.order:
            raise ValueError(
                f"requested order {sum(alpha)} exceeds jet order {self.order}")
        _, pos = _index_tables(self.m, self.order)
        scale = 1.0
        for a in alpha:
            scale *= math.factorial(a)
        return float(self.coeffs[pos[tuple(alpha)]]) * scale

    def derivative(self, var: int) -> "JetValue":
        """Jet of the partial derivative in variable `var`, one order lower."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        if not 0 <= var < self.m:
            raise ValueError("variable index out of range")
        src, dst, fac = _deriv_tables(self.m, self.order, var)
        out = np.zeros(len(dst))
        out[dst] = self.coeffs[src] * fac
        return JetValue(self.m, self.order - 1, out)

    # arithmetic ---------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, float)):
            out = self.coeffs.copy()
            out[0] += other
            return JetValue(self.m, self.order, out)
        a, b = self._align(other)
        return JetValue(a.m, a.order, a.coeffs + b.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return JetValue(self.m, self.order, -self.coeffs)

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            return self + (-other)
        a, b = self._align(other)
        return JetValue(a.m, a.order, a.coeffs - b.coeffs)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return JetValue(self.m, self.order, self.coeffs * other)
        a, b = self._align(other)
        li, lj, lo = _mul_tables(a.m, a.order)
        out = np.bincount(lo, weights=a.coeffs[li] * b.coeffs[lj],
                          minlength=len(a.coeffs))
        return JetValue(a.m, a.order, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            if other == 0.0:
                raise DomainError("division by zero constant")
            return JetValue(self.m, self.order, self.coeffs / other)
        a, b = self._align(other)
        if b.value == 0.0:
            raise DomainError("division by zero constant term")
        return a * b._reciprocal()

    def __rtruediv__(self, other):
        if self.value == 0.0:
            raise DomainError("division by zero constant term")
        return self._reciprocal() * other

    def _reciprocal(self) -> "JetValue":
        c = self.value
        series = [1.0 / c]
        for _ in range(self.order):
            series.append(-series[-1] / c)
        return self._horner(series)

    def _horner(self, series: list[float]) -> "JetValue":
        """Compose the univariate Taylor series with the zero-constant part."""
        w = JetValue(self.m, self.order, self.coeffs.copy())
        w.coeffs[0] = 0.0
        result = JetValue.constant(series[-1], self.m, self.order)
        for a in reversed(series[:-1]):
            result = result * w + a
        return result

    def compose(self, fn: str) -> "JetValue":
        return self._horner(_series(fn, self.value, self.order))

    def ipow(self, n: int) -> "JetValue":
        if n == 0:
            return JetValue.constant(1.0, self.m, self.order)
        base = self if n > 0 else self.__rtruediv__(1.0)
        result = base
        for _ in range(abs(n) - 1):
            result = result * base
        return result

    def __repr__(self):
        return f"JetValue(m={self.m}, order={self.order}, value={self.value!r})"


# ---------------------------------------------------------------------------
# Evaluation


@dataclass(frozen=True)
class EvalContext:
    """Base point and truncation order for jet evaluation."""

    point: tuple[float, ...]
    order: int = 5

    @property
    def dim(self) -> int:
        return len(self.point)

    def seed(self, index: int) -> JetValue:
        return JetValue.variable(index, self.point[index], self.dim, self.order)


def eval_jet(node: ExprAst, ctx: EvalContext) -> JetValue:
    """Evaluate an AST to the jet of the expression at ctx.point."""
    if isinstance(node, Num):
        return JetValue.constant(node.value, ctx.dim, ctx.order)
    if isinstance(node, Var):
        if node.index >= ctx.dim:
            raise ValueError(
                f"variable {node.name!r} (index {node.index}) not seeded in context")
        return ctx.seed(node.index)
    if isinstance(node, Neg):
        return -eval_jet(node.operand, ctx)
    if isinstance(node, BinOp):
        left = eval_jet(node.left, ctx)
        right = eval_jet(node.right, ctx)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        return left / right
    if isinstance(node, Pow):
        base = eval_jet(node.base, ctx)
        exp = node.exponent
        if float(exp).is_integer():
            return base.ipow(int(exp))
        # non-integer exponent lowers to exp/log (positive base required)
        return (base.compose("log") * exp).compose("exp")
    if isinstance(node, Call):
        return eval_jet(node.arg, ctx).compose(node.fn)
    raise TypeError(node)


def extract_partial(jet: JetValue, alpha: tuple[int, ...] | list[int]) -> float:
    """Raw partial derivative d^alpha F at the jet's base point."""
    return jet.partial(tuple(alpha))


def antiderivative_jet(djet: JetValue, var: int, value: float) -> JetValue:
    """Jet of a primitive F with dF/d(var) = djet and F(base) = value, one
    order higher. The integration constant is taken independent of the other
    variables, so this is only exact when the primitive depends on `var`
    alone up to an additive constant (the quadrature-curve use case)."""
    if not 0 <= var < djet.m:
        raise ValueError("variable index out of range")
    m, k = djet.m, djet.order + 1
    _, pos_hi = _index_tables(m, k)
    ordered_lo, _ = _index_tables(m, k - 1)
    out = np.zeros(len(_index_tables(m, k)[0]))
    out[0] = value
    for i, beta in enumerate(ordered_lo):
        target = tuple(b + (1 if v == var else 0) for v, b in enumerate(beta))
        out[pos_hi[target]] = djet.coeffs[i] / (beta[var] + 1)
    return JetValue(m, k, out)
