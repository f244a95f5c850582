"""Scalar functions of t: expression nodes, parser, formatter, evaluators.

Grammar (operator precedence ``^`` > unary minus > ``* /`` > ``+ -``)::

    expr  := term (("+"|"-") term)*
    term  := unary (("*"|"/") unary)*
    unary := "-" unary | power
    power := atom ("^" unary)?
    atom  := NUMBER | "t" | "(" expr ")" | IDENT "(" expr ")"

Besides the parsed node types there is :class:`Integral`, the running
integral ``int_{t0}^t g(tau) dtau`` of another scalar.  Constructors use it
for eigenfunction exponents and forcing quadratures; the parser never
produces it.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from . import kernels as K
from ._pykernels import TAN_POLE_EPS
from .errors import DomainError, ParseError

FUNCTIONS = ("sin", "cos", "tan", "exp", "ln", "sinh", "cosh", "tanh", "atan", "sqrt", "abs")

_FN_OPCODE = {
    "sin": K.OP_SIN, "cos": K.OP_COS, "tan": K.OP_TAN, "exp": K.OP_EXP, "ln": K.OP_LN,
    "sinh": K.OP_SINH, "cosh": K.OP_COSH, "tanh": K.OP_TANH, "atan": K.OP_ATAN,
    "sqrt": K.OP_SQRT, "abs": K.OP_ABS,
}

DEFAULT_QUAD_TOL = 1e-10

# precedence levels used by the formatter
_P_ADD, _P_MUL, _P_UNARY, _P_POW, _P_ATOM = 1, 2, 3, 4, 5


class ScalarExpr:
    """Base class; subclasses are frozen dataclasses."""

    __slots__ = ()

    # -- construction sugar (light identity folding only) -------------------
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, other):
        return power(self, other)

    # -- queries --------------------------------------------------------------
    def children(self) -> tuple:
        return ()

    def walk(self):
        yield self
        for c in self.children():
            yield from c.walk()

    def has_integral(self) -> bool:
        return any(isinstance(n, Integral) for n in self.walk())

    def is_constant(self) -> bool:
        return not any(isinstance(n, (TimeVar, Integral)) for n in self.walk())

    def constant_value(self):
        """Numeric value if the expression does not depend on t, else None."""
        if not self.is_constant():
            return None
        return self.evaluate(0.0)

    def __str__(self):
        return format_scalar(self)

    # -- evaluation -----------------------------------------------------------
    def evaluate(self, t: float, quad_tol: float = DEFAULT_QUAD_TOL) -> float:
        """Value at time ``t``; raises DomainError at singular points."""
        v = self._ev(float(t), quad_tol)
        if not math.isfinite(v):
            raise DomainError(f"non-finite value of {format_scalar(self)} at t={t}")
        return v

    def evaluate_array(self, ts, quad_tol: float = DEFAULT_QUAD_TOL) -> np.ndarray:
        """Vectorized value over an array of times."""
        ts = np.asarray(ts, dtype=float)
        with np.errstate(all="ignore"):
            v = self._ev_arr(ts, quad_tol)
        v = np.broadcast_to(np.asarray(v, dtype=float), ts.shape).copy()
        if not np.all(np.isfinite(v)):
            raise DomainError(f"non-finite value of {format_scalar(self)}")
        return v

    def _ev(self, t, qt):  # pragma: no cover - abstract
        raise NotImplementedError

    def _ev_arr(self, ts, qt):  # pragma: no cover - abstract
        raise NotImplementedError

    def compile(self):
        """Postfix bytecode ``(ops, consts)`` for the numeric kernels.

        Raises ValueError if the tree contains an Integral node.
        """
        ops: list[int] = []
        consts: list[float] = []
        self._emit(ops, consts)
        return np.asarray(ops, dtype=np.int32), np.asarray(consts, dtype=float)

    def _emit(self, ops, consts):  # pragma: no cover - abstract
        raise NotImplementedError


def _check_finite(v, what):
    if not math.isfinite(v):
        raise DomainError(f"non-finite value in {what}")
    return v


@dataclass(frozen=True)
class Const(ScalarExpr):
    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v):
            raise ValueError("constant must be finite")
        object.__setattr__(self, "value", v)

    def _ev(self, t, qt):
        return self.value

    def _ev_arr(self, ts, qt):
        return np.full(ts.shape, self.value)

    def _emit(self, ops, consts):
        ops += [K.OP_CONST, len(consts)]
        consts.append(self.value)


@dataclass(frozen=True)
class TimeVar(ScalarExpr):
    def _ev(self, t, qt):
        return t

    def _ev_arr(self, ts, qt):
        return ts

    def _emit(self, ops, consts):
        ops += [K.OP_T, 0]


@dataclass(frozen=True)
class _Binary(ScalarExpr):
    left: ScalarExpr
    right: ScalarExpr

    def children(self):
        return (self.left, self.right)

    def _ev(self, t, qt):
        return self._apply(self.left._ev(t, qt), self.right._ev(t, qt))

    def _ev_arr(self, ts, qt):
        return self._apply_arr(self.left._ev_arr(ts, qt), self.right._ev_arr(ts, qt))

    def _emit(self, ops, consts):
        self.left._emit(ops, consts)
        self.right._emit(ops, consts)
        ops += [self._opcode, 0]


class Add(_Binary):
    symbol, prec, _opcode = "+", _P_ADD, K.OP_ADD

    def _apply(self, a, b):
        return a + b

    _apply_arr = _apply


class Sub(_Binary):
    symbol, prec, _opcode = "-", _P_ADD, K.OP_SUB

    def _apply(self, a, b):
        return a - b

    _apply_arr = _apply


class Mul(_Binary):
    symbol, prec, _opcode = "*", _P_MUL, K.OP_MUL

    def _apply(self, a, b):
        return a * b

    _apply_arr = _apply


class Div(_Binary):
    symbol, prec, _opcode = "/", _P_MUL, K.OP_DIV

    def _apply(self, a, b):
        if b == 0.0:
            raise DomainError("division by zero")
        return a / b

    def _apply_arr(self, a, b):
        if np.any(np.asarray(b) == 0.0):
            raise DomainError("division by zero")
        return a / b


class Pow(_Binary):
    symbol, prec, _opcode = "^", _P_POW, K.OP_POW

    def _apply(self, a, b):
        if a == 0.0 and b < 0.0:
            raise DomainError("zero raised to a negative power")
        if a < 0.0 and b != math.floor(b):
            raise DomainError("negative base with non-integer exponent")
        try:
            return math.pow(a, b)
        except OverflowError:
            raise DomainError("overflow in power") from None

    def _apply_arr(self, a, b):
        a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
        if np.any((a == 0.0) & (b < 0.0)):
            raise DomainError("zero raised to a negative power")
        if np.any((a < 0.0) & (b != np.floor(b))):
            raise DomainError("negative base with non-integer exponent")
        return np.power(a, b)


@dataclass(frozen=True)
class Neg(ScalarExpr):
    arg: ScalarExpr

    def children(self):
        return (self.arg,)

    def _ev(self, t, qt):
        return -self.arg._ev(t, qt)

    def _ev_arr(self, ts, qt):
        return -self.arg._ev_arr(ts, qt)

    def _emit(self, ops, consts):
        self.arg._emit(ops, consts)
        ops += [K.OP_NEG, 0]


def _tan(x):
    if abs(math.cos(x)) < TAN_POLE_EPS:
        raise DomainError("tan evaluated at a pole")
    return math.tan(x)


def _ln(x):
    if x <= 0.0:
        raise DomainError("ln of a non-positive number")
    return math.log(x)


def _sqrt(x):
    if x < 0.0:
        raise DomainError("sqrt of a negative number")
    return math.sqrt(x)


def _guard_overflow(fn):
    def wrapped(x):
        try:
            return fn(x)
        except OverflowError:
            raise DomainError("overflow in function call") from None
    return wrapped


_SCALAR_FN: dict[str, Callable[[float], float]] = {
    "sin": math.sin, "cos": math.cos, "tan": _tan, "exp": _guard_overflow(math.exp),
    "ln": _ln, "sinh": _guard_overflow(math.sinh), "cosh": _guard_overflow(math.cosh),
    "tanh": math.tanh, "atan": math.atan, "sqrt": _sqrt, "abs": abs,
}


def _arr_fn(name, x):
    if name == "tan":
        if np.any(np.abs(np.cos(x)) < TAN_POLE_EPS):
            raise DomainError("tan evaluated at a pole")
        return np.tan(x)
    if name == "ln":
        if np.any(x <= 0.0):
            raise DomainError("ln of a non-positive number")
        return np.log(x)
    if name == "sqrt":
        if np.any(x < 0.0):
            raise DomainError("sqrt of a negative number")
        return np.sqrt(x)
    return _NP_FN[name](x)


_NP_FN = {
    "sin": np.sin, "cos": np.cos, "exp": np.exp, "sinh": np.sinh, "cosh": np.cosh,
    "tanh": np.tanh, "atan": np.arctan, "abs": np.abs,
}


@dataclass(frozen=True)
class Call(ScalarExpr):
    fn: str
    arg: ScalarExpr

    def __post_init__(self):
        if self.fn not in _SCALAR_FN:
            raise ValueError(f"unknown function {self.fn!r}")

    def children(self):
        return (self.arg,)

    def _ev(self, t, qt):
        return _SCALAR_FN[self.fn](self.arg._ev(t, qt))

    def _ev_arr(self, ts, qt):
        return _arr_fn(self.fn, np.asarray(self.arg._ev_arr(ts, qt), dtype=float))

    def _emit(self, ops, consts):
        self.arg._emit(ops, consts)
        ops += [_FN_OPCODE[self.fn], 0]


@dataclass(frozen=True)
class Integral(ScalarExpr):
    """Running integral ``int_{t0}^t integrand(tau) dtau``.

    Values come from a per-tolerance cumulative table (see
    :mod:`fint.cumulative`) that is filled lazily and shared by every
    evaluation of this node.
    """

    integrand: ScalarExpr
    t0: float
    _tables: dict = field(default_factory=dict, compare=False, hash=False, repr=False)
    _lock: threading.RLock = field(default_factory=threading.RLock, compare=False,
                                   hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "t0", float(self.t0))

    def children(self):
        return (self.integrand,)

    def table(self, quad_tol=DEFAULT_QUAD_TOL):
        from .cumulative import CumulativeTable
        with self._lock:
            tab = self._tables.get(quad_tol)
            if tab is None:
                tab = CumulativeTable(self.integrand, self.t0, quad_tol)
                self._tables[quad_tol] = tab
            return tab

    def _ev(self, t, qt):
        return self.table(qt).value(t)

    def _ev_arr(self, ts, qt):
        return self.table(qt).values(ts)

    def _emit(self, ops, consts):
        raise ValueError("Integral nodes cannot be compiled to bytecode")


T = TimeVar()
ZERO = Const(0.0)
ONE = Const(1.0)

Scalarish = Union[ScalarExpr, float, int]


def as_scalar(v: Scalarish) -> ScalarExpr:
    if isinstance(v, ScalarExpr):
        return v
    if isinstance(v, str):
        return parse_scalar(v)
    return Const(float(v))


def _cval(e):
    return e.value if isinstance(e, Const) else None


def add(a, b):
    a, b = as_scalar(a), as_scalar(b)
    if _cval(a) == 0.0:
        return b
    if _cval(b) == 0.0:
        return a
    if _cval(a) is not None and _cval(b) is not None:
        return Const(a.value + b.value)
    return Add(a, b)


def sub(a, b):
    a, b = as_scalar(a), as_scalar(b)
    if _cval(b) == 0.0:
        return a
    if _cval(a) == 0.0:
        return neg(b)
    if _cval(a) is not None and _cval(b) is not None:
        return Const(a.value - b.value)
    return Sub(a, b)


def mul(a, b):
    a, b = as_scalar(a), as_scalar(b)
    if _cval(a) == 0.0 or _cval(b) == 0.0:
        return ZERO
    if _cval(a) == 1.0:
        return b
    if _cval(b) == 1.0:
        return a
    if _cval(a) == -1.0:
        return neg(b)
    if _cval(b) == -1.0:
        return neg(a)
    if _cval(a) is not None and _cval(b) is not None:
        return Const(a.value * b.value)
    return Mul(a, b)


def div(a, b):
    a, b = as_scalar(a), as_scalar(b)
    if _cval(b) == 1.0:
        return a
    if _cval(a) == 0.0 and _cval(b) != 0.0:
        return ZERO
    return Div(a, b)


def neg(a):
    a = as_scalar(a)
    if _cval(a) is not None:
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a, b):
    a, b = as_scalar(a), as_scalar(b)
    if _cval(b) == 1.0:
        return a
    if _cval(b) == 0.0:
        return ONE
    return Pow(a, b)


def call(fn, a):
    a = as_scalar(a)
    if fn == "exp" and _cval(a) == 0.0:
        return ONE
    return Call(fn, a)


def integral(integrand, t0) -> ScalarExpr:
    integrand = as_scalar(integrand)
    if _cval(integrand) == 0.0:
        return ZERO
    c = _cval(integrand)
    if c is not None:
        # int_{t0}^t c dtau needs no quadrature
        return mul(c, sub(T, float(t0)))
    return Integral(integrand, float(t0))


# ---------------------------------------------------------------------------
# formatting

def _fmt_number(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


# integration variables for nested integrals
_DUMMIES = ("τ", "σ", "ρ", "η", "ξ")


def _fmt(e: ScalarExpr, var: str) -> tuple[str, int]:
    if isinstance(e, Const):
        s = _fmt_number(e.value)
        return s, (_P_UNARY if e.value < 0 else _P_ATOM)
    if isinstance(e, TimeVar):
        return var, _P_ATOM
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _P_UNARY, var, True), _P_UNARY
    if isinstance(e, Pow):
        return _wrap(e.left, _P_ATOM, var) + "^" + _wrap(e.right, _P_UNARY, var, True), _P_POW
    if isinstance(e, _Binary):
        left = _wrap(e.left, e.prec, var)
        # right operand must bind tighter to keep the tree shape
        right = _wrap(e.right, e.prec + 1, var, True)
        return f"{left}{e.symbol}{right}", e.prec
    if isinstance(e, Call):
        return f"{e.fn}({_fmt(e.arg, var)[0]})", _P_ATOM
    if isinstance(e, Integral):
        dummy = _DUMMIES[(_DUMMIES.index(var) + 1) % len(_DUMMIES)] if var in _DUMMIES else "τ"
        inner = _fmt(e.integrand, dummy)[0]
        return f"∫[{_fmt_number(e.t0)},{var}] {inner} d{dummy}", _P_UNARY
    raise TypeError(f"cannot format {type(e).__name__}")


def _wrap(e, min_prec, var, after_op=False):
    s, p = _fmt(e, var)
    # a leading minus right after an operator parses, but "t-(-3)" reads
    # better than "t--3"
    if p < min_prec or (after_op and p == _P_UNARY):
        return f"({s})"
    return s


def format_scalar(e: ScalarExpr, var: str = "t") -> str:
    """Canonical infix text; parses back to an identical tree (no Integral)."""
    return _fmt(e, var)[0]


# ---------------------------------------------------------------------------
# parsing

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.data = text.encode("utf-8")
        self.pos = 0
        self.tok = None
        self.tok_start = 0
        self._advance()

    def _err(self, msg, offset=None):
        raise ParseError(msg, self.tok_start if offset is None else offset)

    def _advance(self):
        d = self.data
        n = len(d)
        while self.pos < n and d[self.pos] in b" \t\r\n":
            self.pos += 1
        self.tok_start = self.pos
        if self.pos >= n:
            self.tok = ("end", None)
            return
        c = d[self.pos:self.pos + 1]
        if c.isdigit() or (c == b"." and self.pos + 1 < n and d[self.pos + 1:self.pos + 2].isdigit()):
            j = self.pos
            while j < n and d[j:j + 1].isdigit():
                j += 1
            if j < n and d[j:j + 1] == b".":
                j += 1
                while j < n and d[j:j + 1].isdigit():
                    j += 1
            if j < n and d[j:j + 1] in (b"e", b"E"):
                k = j + 1
                if k < n and d[k:k + 1] in (b"+", b"-"):
                    k += 1
                if k < n and d[k:k + 1].isdigit():
                    while k < n and d[k:k + 1].isdigit():
                        k += 1
                    j = k
            self.tok = ("num", float(d[self.pos:j].decode()))
            self.pos = j
            return
        if c.isalpha() or c == b"_":
            j = self.pos
            while j < n and (d[j:j + 1].isalnum() or d[j:j + 1] == b"_"):
                j += 1
            self.tok = ("ident", d[self.pos:j].decode())
            self.pos = j
            return
        if c in (b"+", b"-", b"*", b"/", b"^", b"(", b")"):
            self.tok = ("op", c.decode())
            self.pos += 1
            return
        self._err(f"unexpected character {c.decode(errors='replace')!r}")

    def _expect(self, op):
        if self.tok != ("op", op):
            self._err(f"expected {op!r}")
        self._advance()

    def parse(self):
        if self.tok[0] == "end":
            self._err("empty expression")
        e = self.expr()
        if self.tok[0] != "end":
            self._err("unexpected trailing input")
        return e

    def expr(self):
        e = self.term()
        while self.tok in (("op", "+"), ("op", "-")):
            op = self.tok[1]
            self._advance()
            r = self.term()
            e = Add(e, r) if op == "+" else Sub(e, r)
        return e

    def term(self):
        e = self.unary()
        while self.tok in (("op", "*"), ("op", "/")):
            op = self.tok[1]
            self._advance()
            r = self.unary()
            e = Mul(e, r) if op == "*" else Div(e, r)
        return e

    def unary(self):
        if self.tok == ("op", "-"):
            self._advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok == ("op", "^"):
            self._advance()
            return Pow(base, self.unary())
        return base

    def atom(self):
        kind, val = self.tok
        if kind == "num":
            self._advance()
            return Const(val)
        if kind == "ident":
            start = self.tok_start
            self._advance()
            if val == "t":
                return T
            if val not in FUNCTIONS:
                self._err(f"unknown function or variable {val!r}", start)
            if self.tok != ("op", "("):
                self._err(f"expected '(' after {val}")
            self._advance()
            arg = self.expr()
            self._expect(")")
            return Call(val, arg)
        if self.tok == ("op", "("):
            self._advance()
            e = self.expr()
            self._expect(")")
            return e
        if kind == "end":
            self._err("unexpected end of input")
        self._err(f"unexpected token {val!r}")


def parse_scalar(text: str) -> ScalarExpr:
    """Parse a scalar function of ``t``.

    Raises:
        ParseError: with the byte offset of the offending token.
    """
    if not isinstance(text, str):
        raise ParseError("expression must be a string", 0)
    return _Parser(text).parse()


def eval_scalar(e: ScalarExpr, t: float) -> float:
    return e.evaluate(t)


# ---------------------------------------------------------------------------
# serialization (strings for plain scalars, tagged nodes when Integral occurs)

def scalar_to_json(e: ScalarExpr):
    if not e.has_integral():
        return format_scalar(e)
    if isinstance(e, Integral):
        return {"integral": scalar_to_json(e.integrand), "t0": e.t0}
    if isinstance(e, Neg):
        return {"op": "neg", "args": [scalar_to_json(e.arg)]}
    if isinstance(e, Call):
        return {"op": e.fn, "args": [scalar_to_json(e.arg)]}
    if isinstance(e, _Binary):
        return {"op": e.symbol, "args": [scalar_to_json(e.left), scalar_to_json(e.right)]}
    raise TypeError(type(e).__name__)


_BIN_BY_SYMBOL = {"+": Add, "-": Sub, "*": Mul, "/": Div, "^": Pow}


def scalar_from_json(obj) -> ScalarExpr:
    if isinstance(obj, str):
        return parse_scalar(obj)
    if isinstance(obj, (int, float)):
        return Const(obj)
    if "integral" in obj:
        return Integral(scalar_from_json(obj["integral"]), obj["t0"])
    op, args = obj["op"], [scalar_from_json(a) for a in obj["args"]]
    if op == "neg":
        return Neg(args[0])
    if op in _BIN_BY_SYMBOL:
        return _BIN_BY_SYMBOL[op](*args)
    return Call(op, args[0])
