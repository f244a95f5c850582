"""Integral expressions: evaluable trees over (t, x1..xn).

Every constructor in the package returns one of these trees.  Evaluation
is vectorized over N points at once (``t`` of shape (N,), ``x`` of shape
(N, n)); scalar helpers wrap it.  Nodes are immutable and may be shared
between trees; evaluation memoizes shared subtrees per call.

Complex quantities are represented by pairs of real trees (real part,
imaginary part); see :func:`complex_linform`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import scalar as S
from .errors import DomainError
from .scalar import ScalarExpr, eval_scalar, format_scalar, parse_scalar  # noqa: F401

ARCTAN_BAND = 1e-12

_P_ADD, _P_MUL, _P_UNARY, _P_POW, _P_ATOM = 1, 2, 3, 4, 5


@dataclass(frozen=True)
class EvalPoint:
    t: float
    x: tuple

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        if not (math.isfinite(self.t) and all(math.isfinite(v) for v in self.x)):
            raise ValueError("evaluation point must be finite")


class _Ctx:
    __slots__ = ("t", "x", "quad_tol", "memo")

    def __init__(self, t, x, quad_tol):
        self.t = t
        self.x = x
        self.quad_tol = quad_tol
        self.memo = {}


def _as_node(v) -> "IntegralExpr":
    if isinstance(v, IntegralExpr):
        return v
    if isinstance(v, S.ScalarExpr):
        return ScalarLift(v)
    if isinstance(v, (int, float, Fraction)):
        return ScalarLift(S.Const(float(v)))
    raise TypeError(f"cannot use {type(v).__name__} in an integral expression")


class IntegralExpr:
    """Base class of integral-expression nodes."""

    prec = _P_ATOM

    # -- structure --------------------------------------------------------------
    def children(self) -> tuple:
        return ()

    def rebuild(self, children):
        return self

    def walk(self):
        seen = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            yield node
            stack.extend(reversed(node.children()))

    def linforms(self):
        return [n for n in self.walk() if isinstance(n, LinForm)]

    @property
    def n(self):
        """System dimension (from the first linear form), or None."""
        for node in self.walk():
            if isinstance(node, (LinForm, Psi)):
                return node.n
        return None

    def depends_on_t(self) -> bool:
        for node in self.walk():
            if isinstance(node, (Quadrature,)):
                return True
            if isinstance(node, ScalarLift) and not node.scalar.is_constant():
                return True
            if isinstance(node, (LinForm, Psi)) and node.g is not None:
                return True
        return False

    # -- evaluation --------------------------------------------------------------
    def evaluate_many(self, t, x, quad_tol: float = S.DEFAULT_QUAD_TOL) -> np.ndarray:
        """Values at N points: ``t`` shape (N,), ``x`` shape (N, n)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[0] != t.shape[0]:
            if t.shape[0] == 1:
                t = np.full(x.shape[0], t[0])
            else:
                raise ValueError("t and x disagree on the number of points")
        ctx = _Ctx(t, x, quad_tol)
        with np.errstate(all="ignore"):
            v = self._value(ctx)
        v = np.broadcast_to(np.asarray(v, dtype=float), t.shape).copy()
        if not np.all(np.isfinite(v)):
            raise DomainError(f"non-finite value of {self.format()[:80]}")
        return v

    def evaluate(self, t: float, x: Sequence[float], quad_tol: float = S.DEFAULT_QUAD_TOL) -> float:
        return float(self.evaluate_many([t], [list(x)], quad_tol)[0])

    def _value(self, ctx):
        key = id(self)
        v = ctx.memo.get(key)
        if v is None:
            v = self._eval(ctx)
            ctx.memo[key] = v
        return v

    def _eval(self, ctx):  # pragma: no cover - abstract
        raise NotImplementedError

    # -- formatting -------------------------------------------------------------------
    def format(self) -> str:
        return self._fmt()[0]

    def __str__(self):
        return self.format()

    def _fmt(self):  # pragma: no cover - abstract
        raise NotImplementedError

    # -- singular sets ------------------------------------------------------------
    def singular_denominators(self) -> list:
        """(expression, description) pairs whose zero sets must be avoided."""
        out = []
        seen = set()

        def add(node, what):
            key = node.format()
            if key not in seen:
                seen.add(key)
                out.append((node, what))

        for node in self.walk():
            if isinstance(node, Div):
                add(node.den, "quotient denominator")
            elif isinstance(node, Arctan):
                add(node.den, "arctan denominator")
            elif isinstance(node, Ln):
                add(node.arg, "logarithm argument")
            elif isinstance(node, Pow):
                h = float(node.h)
                base = node.base.arg if isinstance(node.base, Abs) else node.base
                if h < 1 and (h < 0 or isinstance(node.base, Abs) or not _is_int(node.h)):
                    add(base, "power base")
            elif isinstance(node, Psi):
                add(node.leading_form(), "chain leading form")
        return out

    def singular_description(self) -> list[str]:
        return [f"{e.format()} ≠ 0" for e, _ in self.singular_denominators()]

    # -- operators ----------------------------------------------------------------------
    def __add__(self, o):
        return Add(self, _as_node(o))

    def __radd__(self, o):
        return Add(_as_node(o), self)

    def __sub__(self, o):
        return Sub(self, _as_node(o))

    def __rsub__(self, o):
        return Sub(_as_node(o), self)

    def __mul__(self, o):
        return Mul(self, _as_node(o))

    def __rmul__(self, o):
        return Mul(_as_node(o), self)

    def __truediv__(self, o):
        return Div(self, _as_node(o))

    def __rtruediv__(self, o):
        return Div(_as_node(o), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, h):
        return Pow(self, h)

    # -- serialization ------------------------------------------------------------------
    def to_json(self):  # pragma: no cover - abstract
        raise NotImplementedError


def _is_int(h) -> bool:
    if isinstance(h, Fraction):
        return h.denominator == 1
    return float(h) == int(float(h))


# ---------------------------------------------------------------------------
# leaves

class ScalarLift(IntegralExpr):
    """A function of t alone."""

    def __init__(self, scalar: S.ScalarExpr):
        self.scalar = S.as_scalar(scalar)
        self.prec = _scalar_prec(self.scalar)

    def _eval(self, ctx):
        return self.scalar.evaluate_array(ctx.t, ctx.quad_tol)

    def _fmt(self):
        return S.format_scalar(self.scalar), self.prec

    def to_json(self):
        return {"node": "scalar", "value": S.scalar_to_json(self.scalar)}


def _scalar_prec(e):
    if isinstance(e, (S.Add, S.Sub)):
        return _P_ADD
    if isinstance(e, (S.Mul, S.Div)):
        return _P_MUL
    if isinstance(e, (S.Neg, S.Integral)) or (isinstance(e, S.Const) and e.value < 0):
        return _P_UNARY
    if isinstance(e, S.Pow):
        return _P_POW
    return _P_ATOM


def const(v) -> ScalarLift:
    return ScalarLift(S.Const(float(v)))


def _fmt_coeff(c, exact=None) -> str:
    """Magnitude text of a coefficient (sign handled by the caller)."""
    if exact is not None:
        a = abs(exact)
        if a.denominator == 1:
            return str(a.numerator)
        return f"({a.numerator}/{a.denominator})"
    a = abs(c)
    if a == int(a) and a < 1e15:
        return str(int(a))
    return f"{a:.12g}"


class LinForm(IntegralExpr):
    """Linear form nu . x, or nu . (g(t) x) when a transform g is given.

    Args:
        coeffs: real coefficient vector nu (length n).
        g: optional n x n matrix of ScalarExpr.
        exact: optional tuple of Fractions equal to ``coeffs`` (formatting).
    """

    def __init__(self, coeffs, g=None, exact=None):
        self.coeffs = np.asarray(coeffs, dtype=float).copy()
        self.coeffs.setflags(write=False)
        if self.coeffs.ndim != 1:
            raise ValueError("coefficient vector must be one-dimensional")
        self.g = None if g is None else tuple(tuple(S.as_scalar(e) for e in row) for row in g)
        if self.g is not None and (len(self.g) != self.n or any(len(r) != self.n for r in self.g)):
            raise ValueError("transform must be n x n")
        self.exact = None if exact is None else tuple(Fraction(v) for v in exact)
        nz = int(np.count_nonzero(self.coeffs)) if self.g is None else 2
        self.prec = _P_ADD if nz > 1 else _P_MUL

    @property
    def n(self):
        return self.coeffs.shape[0]

    def is_zero(self):
        return not np.any(self.coeffs)

    def coefficient_scalars(self):
        """Coefficients of x_k as ScalarExpr (nu^T g(t))_k."""
        if self.g is None:
            return [S.Const(float(c)) for c in self.coeffs]
        out = []
        for k in range(self.n):
            acc = S.ZERO
            for i in range(self.n):
                acc = S.add(acc, S.mul(float(self.coeffs[i]), self.g[i][k]))
            out.append(acc)
        return out

    def transform_values(self, ts, quad_tol=S.DEFAULT_QUAD_TOL):
        """g evaluated at times ts, shape (N, n, n)."""
        n = self.n
        G = np.empty((len(ts), n, n))
        for i in range(n):
            for j in range(n):
                G[:, i, j] = self.g[i][j].evaluate_array(ts, quad_tol)
        return G

    def _eval(self, ctx):
        if ctx.x.shape[1] != self.n:
            raise ValueError(f"linear form of dimension {self.n} applied to {ctx.x.shape[1]} states")
        if self.g is None:
            return ctx.x @ self.coeffs
        key = ("g", self.g)
        G = ctx.memo.get(key)
        if G is None:
            G = self.transform_values(ctx.t, ctx.quad_tol)
            ctx.memo[key] = G
        y = np.einsum("nij,nj->ni", G, ctx.x)
        return y @ self.coeffs

    def _fmt(self):
        terms = []
        if self.g is None:
            for k, c in enumerate(self.coeffs):
                if c == 0:
                    continue
                ex = self.exact[k] if self.exact is not None else None
                mag = _fmt_coeff(c, ex)
                body = f"x{k + 1}" if mag == "1" else f"{mag}*x{k + 1}"
                terms.append(("-" if c < 0 else "+", body))
        else:
            for k, cs in enumerate(self.coefficient_scalars()):
                cv = cs.constant_value() if cs.is_constant() else None
                if cv is not None:
                    if cv == 0:
                        continue
                    mag = _fmt_coeff(cv)
                    body = f"x{k + 1}" if mag == "1" else f"{mag}*x{k + 1}"
                    terms.append(("-" if cv < 0 else "+", body))
                    continue
                sign = "+"
                if isinstance(cs, S.Neg):
                    sign, cs = "-", cs.arg
                s, p = S.format_scalar(cs), _scalar_prec(cs)
                if p < _P_MUL:
                    s = f"({s})"
                terms.append((sign, f"{s}*x{k + 1}"))
        if not terms:
            return "0", _P_ATOM
        out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            out += sign + body
        if len(terms) == 1:
            if terms[0][0] == "-":
                return out, _P_UNARY
            return out, (_P_ATOM if "*" not in out else _P_MUL)
        return out, _P_ADD

    def to_json(self):
        d = {"node": "linform"}
        if self.exact is not None:
            d["coeffs"] = [str(v) for v in self.exact]
        else:
            d["coeffs"] = [float(v) for v in self.coeffs]
        if self.g is not None:
            d["g"] = [[S.scalar_to_json(e) for e in row] for row in self.g]
        return d

    def perturbed(self, delta):
        """Copy with the first nonzero coefficient shifted by delta."""
        c = np.array(self.coeffs)
        k = int(np.flatnonzero(c)[0]) if np.any(c) else 0
        c[k] += delta
        return LinForm(c, self.g)


def complex_linform(nu, g=None, exact=None):
    """Real and imaginary parts of nu . x for a complex vector nu.

    Returns (re, im) with ``im`` None when nu is real.
    """
    nu = np.asarray(nu, dtype=complex)
    ex_re = ex_im = None
    if exact is not None:
        ex_re = tuple(q.re for q in exact)
        ex_im = tuple(q.im for q in exact)
    re = LinForm(nu.real, g, ex_re)
    if not np.any(nu.imag):
        return re, None
    return re, LinForm(nu.imag, g, ex_im)


# ---------------------------------------------------------------------------
# composite nodes

class _Bin(IntegralExpr):
    symbol = "?"

    def __init__(self, left, right):
        self.left = _as_node(left)
        self.right = _as_node(right)

    def children(self):
        return (self.left, self.right)

    def rebuild(self, ch):
        return type(self)(*ch)

    def _fmt(self):
        ls, lp = self.left._fmt()
        rs, rp = self.right._fmt()
        if lp < self.prec:
            ls = f"({ls})"
        sym = self.symbol
        if self.prec == _P_ADD and rp == _P_MUL and rs.startswith("-"):
            # a - (-u*v) prints as a+u*v
            sym, rs = ("-" if sym == "+" else "+"), rs[1:]
        elif rp <= self.prec or rp == _P_UNARY:
            rs = f"({rs})"
        return f"{ls}{sym}{rs}", self.prec

    def to_json(self):
        return {"node": self.tag, "args": [self.left.to_json(), self.right.to_json()]}


class Add(_Bin):
    symbol, prec, tag = "+", _P_ADD, "add"

    def _eval(self, ctx):
        return self.left._value(ctx) + self.right._value(ctx)


class Sub(_Bin):
    symbol, prec, tag = "-", _P_ADD, "sub"

    def _eval(self, ctx):
        return self.left._value(ctx) - self.right._value(ctx)


class Mul(_Bin):
    symbol, prec, tag = "*", _P_MUL, "mul"

    def _eval(self, ctx):
        return self.left._value(ctx) * self.right._value(ctx)


class Div(_Bin):
    symbol, prec, tag = "/", _P_MUL, "div"

    @property
    def den(self):
        return self.right

    def _eval(self, ctx):
        d = self.right._value(ctx)
        if np.any(d == 0.0):
            raise DomainError(f"division by zero in {self.format()[:80]}")
        return self.left._value(ctx) / d


class Neg(IntegralExpr):
    prec = _P_UNARY

    def __init__(self, arg):
        self.arg = _as_node(arg)

    def children(self):
        return (self.arg,)

    def rebuild(self, ch):
        return Neg(ch[0])

    def _eval(self, ctx):
        return -self.arg._value(ctx)

    def _fmt(self):
        s, p = self.arg._fmt()
        if p <= _P_UNARY:
            s = f"({s})"
        return "-" + s, _P_UNARY

    def to_json(self):
        return {"node": "neg", "args": [self.arg.to_json()]}


def _fmt_h(h) -> str:
    if isinstance(h, Fraction):
        if h.denominator == 1:
            return str(h.numerator) if h >= 0 else f"({h.numerator})"
        return f"({h.numerator}/{h.denominator})"
    if float(h) == int(float(h)):
        v = int(float(h))
        return str(v) if v >= 0 else f"({v})"
    return f"({float(h):.12g})"


class Pow(IntegralExpr):
    """base ** h for a fixed real exponent h (Fraction when rational)."""

    prec = _P_POW

    def __init__(self, base, h):
        self.base = _as_node(base)
        if isinstance(h, int):
            h = Fraction(h)
        elif isinstance(h, float) and h == int(h):
            h = Fraction(int(h))
        self.h = h

    def children(self):
        return (self.base,)

    def rebuild(self, ch):
        return Pow(ch[0], self.h)

    def _eval(self, ctx):
        b = self.base._value(ctx)
        h = float(self.h)
        if isinstance(self.base, Abs):
            zero = b == 0.0
            if np.any(zero):
                if h < 1:
                    raise DomainError("|u|^h with h < 1 evaluated at u = 0")
                out = np.zeros_like(b)
                nz = ~zero
                out[nz] = np.power(b[nz], h)
                return out
            return np.power(b, h)
        if _is_int(self.h):
            if h < 0 and np.any(b == 0.0):
                raise DomainError("negative power of zero")
            return np.power(b, int(h)) if h >= 0 else 1.0 / np.power(b, -int(h))
        if np.any(b < 0.0):
            raise DomainError("negative base with non-integer exponent")
        if h < 0 and np.any(b == 0.0):
            raise DomainError("negative power of zero")
        return np.power(b, h)

    def _fmt(self):
        s, p = self.base._fmt()
        if p < _P_ATOM:
            s = f"({s})"
        return f"{s}^{_fmt_h(self.h)}", _P_POW

    def to_json(self):
        h = str(self.h) if isinstance(self.h, Fraction) else float(self.h)
        return {"node": "pow", "h": h, "args": [self.base.to_json()]}


class _Fn(IntegralExpr):
    name = "?"

    def __init__(self, arg):
        self.arg = _as_node(arg)

    def children(self):
        return (self.arg,)

    def rebuild(self, ch):
        return type(self)(ch[0])

    def _fmt(self):
        return f"{self.name}({self.arg._fmt()[0]})", _P_ATOM

    def to_json(self):
        return {"node": self.name, "args": [self.arg.to_json()]}


class Exp(_Fn):
    name = "exp"

    def _eval(self, ctx):
        v = np.exp(self.arg._value(ctx))
        if not np.all(np.isfinite(v)):
            raise DomainError("overflow in exp")
        return v


class Ln(_Fn):
    name = "ln"

    def _eval(self, ctx):
        a = self.arg._value(ctx)
        if np.any(a <= 0.0):
            raise DomainError("ln of a non-positive value")
        return np.log(a)


class Abs(_Fn):
    name = "abs"

    def _eval(self, ctx):
        return np.abs(self.arg._value(ctx))


class Arctan(IntegralExpr):
    """Principal arctan(num/den); raises inside a small band around den = 0."""

    def __init__(self, num, den):
        self.num = _as_node(num)
        self.den = _as_node(den)

    def children(self):
        return (self.num, self.den)

    def rebuild(self, ch):
        return Arctan(*ch)

    def _eval(self, ctx):
        a = self.num._value(ctx)
        b = self.den._value(ctx)
        if np.any(np.abs(b) <= ARCTAN_BAND * np.maximum(1.0, np.abs(a))):
            raise DomainError("arctan evaluated on its singular set (denominator ~ 0)")
        return np.arctan(a / b)

    def _fmt(self):
        return f"atan(({self.num.format()})/({self.den.format()}))", _P_ATOM

    def to_json(self):
        return {"node": "atan", "args": [self.num.to_json(), self.den.to_json()]}


class Quadrature(IntegralExpr):
    """int_{t0}^t integrand(tau) dtau; a function of t only."""

    prec = _P_UNARY

    def __init__(self, integrand, t0: float):
        self.integrand = S.as_scalar(integrand)
        self.t0 = float(t0)
        self._node = S.Integral(self.integrand, self.t0)

    @staticmethod
    def wrap(node: "S.Integral") -> "Quadrature":
        """Reuse an existing scalar Integral (and its cumulative tables)."""
        q = Quadrature.__new__(Quadrature)
        q.integrand = node.integrand
        q.t0 = node.t0
        q._node = node
        return q

    @property
    def scalar(self):
        return self._node

    def _eval(self, ctx):
        return self._node.evaluate_array(ctx.t, ctx.quad_tol)

    def _fmt(self):
        return S.format_scalar(self._node), _P_UNARY

    def to_json(self):
        return {"node": "quad", "t0": self.t0, "integrand": S.scalar_to_json(self.integrand)}


class Psi(IntegralExpr):
    """Psi_index of a chain: the solution of the triangular system

        nu^k x = sum_{tau=1}^k C(k-1, tau-1) Psi_tau nu^{k-tau} x,  k = 1..index,

    evaluated pointwise (complex arithmetic; ``part`` picks Re or Im).
    """

    def __init__(self, vectors, index: int, part: str = "re", g=None):
        self.vectors = tuple(np.asarray(v, dtype=complex) for v in vectors)
        if not 1 <= index < len(self.vectors):
            raise ValueError("Psi index must be in 1..m-1")
        if part not in ("re", "im"):
            raise ValueError("part must be 're' or 'im'")
        self.index = int(index)
        self.part = part
        self.g = None if g is None else tuple(tuple(S.as_scalar(e) for e in row) for row in g)

    @property
    def n(self):
        return self.vectors[0].shape[0]

    @property
    def is_complex(self):
        return any(np.any(v.imag) for v in self.vectors)

    def leading_form(self):
        """nu^0 x (its real part, or |nu^0 x|^2 for a complex chain)."""
        re, im = complex_linform(self.vectors[0], self.g)
        if im is None:
            return re
        return re * re + im * im

    def _forms(self, ctx):
        key = ("psiforms", id(self.vectors), self.g)
        vals = ctx.memo.get(key)
        if vals is None:
            if self.g is None:
                y = ctx.x
            else:
                G = LinForm(np.zeros(self.n), self.g).transform_values(ctx.t, ctx.quad_tol)
                y = np.einsum("nij,nj->ni", G, ctx.x)
            vals = [y @ v for v in self.vectors]
            ctx.memo[key] = vals
        return vals

    def complex_values(self, ctx):
        key = ("psi", id(self.vectors), self.g)
        cache = ctx.memo.get(key)
        if cache is None:
            cache = ctx.memo[key] = {}
        if self.index in cache:
            return cache[self.index]
        forms = self._forms(ctx)
        p0 = forms[0]
        if np.any(np.abs(p0) == 0.0):
            raise DomainError("Psi evaluated where nu^0 x = 0")
        psi = cache.get("all")
        if psi is None or len(psi) <= self.index:
            psi = [None]
            for k in range(1, len(self.vectors)):
                acc = forms[k].astype(complex)
                for tau in range(1, k):
                    acc = acc - math.comb(k - 1, tau - 1) * psi[tau] * forms[k - tau]
                psi.append(acc / p0)
            cache["all"] = psi
        return psi[self.index]

    def _eval(self, ctx):
        v = self.complex_values(ctx)
        return v.real if self.part == "re" else v.imag

    def explicit(self) -> IntegralExpr:
        """The same function as an explicit rational tree (real chains only)."""
        if self.is_complex:
            raise ValueError("explicit form is only built for real chains")
        forms = [LinForm(v.real, self.g) for v in self.vectors]
        psi = [None]
        for k in range(1, self.index + 1):
            acc = forms[k]
            for tau in range(1, k):
                acc = acc - scaled(math.comb(k - 1, tau - 1), psi[tau] * forms[k - tau])
            psi.append(acc / forms[0])
        return psi[self.index]

    def _fmt(self):
        vecs = ";".join(",".join(_fmt_cnum(c) for c in v) for v in self.vectors[:self.index + 1])
        head = f"Ψ{self.index}" if self.part == "re" else f"ImΨ{self.index}"
        if self.is_complex and self.part == "re":
            head = f"ReΨ{self.index}"
        tr = "g(t)" if self.g is not None else ""
        return f"{head}[{vecs}]({tr}x)", _P_ATOM

    def to_json(self):
        d = {"node": "psi", "index": self.index, "part": self.part,
             "vectors": [[[float(c.real), float(c.imag)] for c in v] for v in self.vectors]}
        if self.g is not None:
            d["g"] = [[S.scalar_to_json(e) for e in row] for row in self.g]
        return d


def _fmt_cnum(c) -> str:
    c = complex(c)
    def r(v):
        return str(int(v)) if v == int(v) else f"{v:.10g}"
    if c.imag == 0:
        return r(c.real)
    if c.real == 0:
        return f"{r(c.imag)}i"
    return f"{r(c.real)}{'+' if c.imag > 0 else '-'}{r(abs(c.imag))}i"


# ---------------------------------------------------------------------------
# builders

def exp_(u) -> IntegralExpr:
    return Exp(_as_node(u))


def ln_(u) -> IntegralExpr:
    return Ln(_as_node(u))


def abs_(u) -> IntegralExpr:
    return Abs(_as_node(u))


def atan_(num, den) -> IntegralExpr:
    return Arctan(num, den)


def power_(u, h, use_abs: bool | None = None) -> IntegralExpr:
    """u**h; integer h keeps the sign of u, other h use |u|."""
    if isinstance(h, float) and h == int(h):
        h = Fraction(int(h))
    if isinstance(h, int):
        h = Fraction(h)
    if h == 1:
        return _as_node(u)
    if use_abs is None:
        use_abs = not _is_int(h)
    return Pow(Abs(u) if use_abs else _as_node(u), h)


def product_of_powers(factors) -> IntegralExpr:
    """prod u_i ** h_i with negative exponents moved to a denominator."""
    num, den = [], []
    for u, h in factors:
        if h == 0:
            continue
        if h > 0:
            num.append(power_(u, h))
        else:
            den.append(power_(u, -h))
    def prod(items):
        out = items[0]
        for it in items[1:]:
            out = Mul(out, it)
        return out
    if not num and not den:
        return const(1.0)
    if not den:
        return prod(num)
    if not num:
        return Div(const(1.0), prod(den))
    return Div(prod(num), prod(den))


def scaled(c, node) -> IntegralExpr:
    """c*node with trivial coefficients folded."""
    c = float(c)
    if c == 1.0:
        return node
    if c == -1.0:
        return Neg(node)
    return Mul(const(c), node)


# ---------------------------------------------------------------------------
# operations named by the public API

def eval_integral(F: IntegralExpr, p: EvalPoint, quad_tol: float = S.DEFAULT_QUAD_TOL) -> float:
    return F.evaluate(p.t, p.x, quad_tol)


def numeric_partial(F: IntegralExpr, p: EvalPoint, var, quad_tol: float = S.DEFAULT_QUAD_TOL) -> float:
    """Central difference of F in ``t`` (var="t" or -1) or in x_i (var=i, 0-based)."""
    eps = np.finfo(float).eps
    if var == "t" or var == -1:
        c = p.t
        h = eps ** (1 / 3) * (1 + abs(c))
        ts = [c + h, c - h]
        xs = [list(p.x), list(p.x)]
    else:
        i = int(var)
        c = p.x[i]
        h = eps ** (1 / 3) * (1 + abs(c))
        xp, xm = list(p.x), list(p.x)
        xp[i] = c + h
        xm[i] = c - h
        ts = [p.t, p.t]
        xs = [xp, xm]
    # recompute h as the representable step actually taken
    v = F.evaluate_many(ts, xs, quad_tol)
    step = (ts[0] - ts[1]) if (var == "t" or var == -1) else (xs[0][int(var)] - xs[1][int(var)])
    return float((v[0] - v[1]) / step)


def gradient(F: IntegralExpr, t, x, quad_tol: float = S.DEFAULT_QUAD_TOL) -> np.ndarray:
    """[dF/dt, dF/dx_1, ..., dF/dx_n] by central differences, vectorized."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    eps = np.finfo(float).eps
    ts, xs, steps = [], [], []
    h = eps ** (1 / 3) * (1 + abs(t))
    ts += [t + h, t - h]
    xs += [x, x]
    steps.append((t + h) - (t - h))
    for i in range(n):
        h = eps ** (1 / 3) * (1 + abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        ts += [t, t]
        xs += [xp, xm]
        steps.append(xp[i] - xm[i])
    v = F.evaluate_many(np.array(ts), np.array(xs), quad_tol)
    return (v[0::2] - v[1::2]) / np.array(steps)


def format_integral(F: IntegralExpr) -> str:
    return F.format()


def rewrite(F: IntegralExpr, fn) -> IntegralExpr:
    """Bottom-up rebuild; ``fn(node)`` returns a replacement or None."""
    memo = {}

    def go(node):
        key = id(node)
        if key in memo:
            return memo[key]
        ch = node.children()
        new = node
        if ch:
            nch = [go(c) for c in ch]
            if any(a is not b for a, b in zip(nch, ch)):
                new = node.rebuild(nch)
        r = fn(new)
        memo[key] = new if r is None else r
        return memo[key]

    return go(F)


def perturb_first_coefficient(F: IntegralExpr, delta: float = 1e-3) -> IntegralExpr:
    """Copy of F with the first linear form's leading coefficient shifted."""
    done = []

    def fn(node):
        if isinstance(node, LinForm) and not done:
            done.append(True)
            return node.perturbed(delta)
        return None

    G = rewrite(F, fn)
    if not done:
        raise ValueError("expression has no linear form to perturb")
    return G


# ---------------------------------------------------------------------------
# JSON round trip

def from_json(d) -> IntegralExpr:
    kind = d["node"]
    if kind == "scalar":
        return ScalarLift(S.scalar_from_json(d["value"]))
    if kind == "linform":
        coeffs = d["coeffs"]
        exact = None
        if coeffs and isinstance(coeffs[0], str):
            exact = [Fraction(c) for c in coeffs]
            coeffs = [float(c) for c in exact]
        g = None
        if "g" in d:
            g = [[S.scalar_from_json(e) for e in row] for row in d["g"]]
        return LinForm(coeffs, g, exact)
    if kind == "quad":
        return Quadrature(S.scalar_from_json(d["integrand"]), d["t0"])
    if kind == "psi":
        vecs = [[complex(a, b) for a, b in v] for v in d["vectors"]]
        g = None
        if "g" in d:
            g = [[S.scalar_from_json(e) for e in row] for row in d["g"]]
        return Psi(vecs, d["index"], d["part"], g)
    args = [from_json(a) for a in d.get("args", [])]
    if kind == "pow":
        h = d["h"]
        h = Fraction(h) if isinstance(h, str) else float(h)
        return Pow(args[0], h)
    table = {"add": Add, "sub": Sub, "mul": Mul, "div": Div, "neg": Neg, "exp": Exp,
             "ln": Ln, "abs": Abs, "atan": Arctan}
    return table[kind](*args)


__all__ = [
    "EvalPoint", "IntegralExpr", "ScalarLift", "LinForm", "Add", "Sub", "Mul", "Div", "Neg",
    "Pow", "Exp", "Ln", "Abs", "Arctan", "Quadrature", "Psi", "const", "complex_linform",
    "exp_", "ln_", "abs_", "atan_", "power_", "product_of_powers", "scaled", "eval_integral",
    "numeric_partial", "gradient", "format_integral", "rewrite", "perturb_first_coefficient",
    "from_json", "ScalarExpr", "parse_scalar", "eval_scalar", "format_scalar",
]
