"""Exact arithmetic over the Gaussian rationals Q(i).

Small dense linear algebra (row reduction, rank, null spaces), the
characteristic polynomial by Faddeev-LeVerrier, and exact search for
integer and Gaussian-integer roots.  Everything here is plain Python on
``fractions.Fraction``; matrices are lists of lists.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce

from .errors import SpectralError


class QI:
    """Gaussian rational ``re + im*i`` with Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @staticmethod
    def of(v) -> "QI":
        if isinstance(v, QI):
            return v
        if isinstance(v, complex):
            return QI(to_fraction(v.real), to_fraction(v.imag))
        return QI(to_fraction(v))

    def __add__(self, o):
        o = QI.of(o)
        return QI(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        o = QI.of(o)
        return QI(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return QI.of(o) - self

    def __mul__(self, o):
        o = QI.of(o)
        return QI(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = QI.of(o)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("QI division by zero")
        return QI((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, o):
        return QI.of(o) / self

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __eq__(self, o):
        if isinstance(o, (int, Fraction, float, complex, QI)):
            o = QI.of(o)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QI({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        return f"{self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}i"

    def conj(self):
        return QI(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self):
        return self.im == 0


def to_fraction(x) -> Fraction:
    """Exact rational for ints/Fractions; shortest decimal reading for floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite entry")
    if x == int(x):
        return Fraction(int(x))
    return Fraction(repr(x))


def is_rational_matrix(a) -> bool:
    """True if every entry has a short exact decimal reading (denominator <= 10^6)."""
    for row in a:
        for v in row:
            f = to_fraction(v)
            if f.denominator > 10 ** 6:
                return False
    return True


def qmat(a):
    return [[QI.of(v) for v in row] for row in a]


def zeros(r, c):
    return [[QI() for _ in range(c)] for _ in range(r)]


def eye(n):
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = QI(1)
    return m


def transpose(a):
    return [list(r) for r in zip(*a)]


def matmul(a, b):
    bt = transpose(b)
    return [[reduce(lambda s, p: s + p[0] * p[1], zip(r, c), QI()) for c in bt] for r in a]


def matvec(a, v):
    return [reduce(lambda s, p: s + p[0] * p[1], zip(r, v), QI()) for r in a]


def shift(a, lam):
    """a - lam*I."""
    lam = QI.of(lam)
    return [[v - lam if i == j else v for j, v in enumerate(r)] for i, r in enumerate(a)]


def rref(a):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    m = [list(r) for r in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    piv = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = QI(1) / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        piv.append(c)
        r += 1
        if r == rows:
            break
    return m, piv


def rank(a) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def nullspace(a, ncols=None):
    """Basis of {v : a v = 0} as a list of vectors."""
    if not a:
        n = ncols or 0
        return [[QI(1) if i == j else QI() for i in range(n)] for j in range(n)]
    cols = len(a[0])
    r, piv = rref(a)
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        v = [QI() for _ in range(cols)]
        v[f] = QI(1)
        for i, pc in enumerate(piv):
            v[pc] = -r[i][f]
        basis.append(v)
    return basis


def independent_of(vectors, v) -> bool:
    """True if v is not in span(vectors)."""
    if not vectors:
        return any(v)
    return rank(vectors + [v]) > rank(vectors)


def solve(a, b):
    """One solution of a x = b or None (a is r x c)."""
    aug = [list(r) + [bv] for r, bv in zip(a, b)]
    r, piv = rref(aug)
    cols = len(a[0])
    if cols in piv:
        return None
    x = [QI() for _ in range(cols)]
    for i, pc in enumerate(piv):
        x[pc] = r[i][cols]
    return x


# ---------------------------------------------------------------------------
# characteristic polynomial and exact roots

def common_denominator(a) -> int:
    d = 1
    for row in a:
        for v in row:
            d = d * v.denominator // math.gcd(d, v.denominator)
    return d


def charpoly_int(m) -> list[int]:
    """Coefficients c_0..c_n of det(x I - m) for an integer matrix (Faddeev-LeVerrier)."""
    n = len(m)
    c = [0] * (n + 1)
    c[n] = 1
    mk = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        # mk <- m @ mk + c[n-k+1] I
        prod = [[sum(m[i][l] * mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            prod[i][i] += c[n - k + 1]
        mk = prod
        am = [[sum(m[i][l] * mk[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        tr = sum(am[i][i] for i in range(n))
        if tr % k:
            raise ArithmeticError("Faddeev-LeVerrier produced a non-integer coefficient")
        c[n - k] = -tr // k
    return c


def charpoly(a) -> list[Fraction]:
    """Coefficients c_0..c_n of det(x I - a) for a rational matrix."""
    fr = [[to_fraction(v) for v in row] for row in a]
    d = common_denominator(fr)
    mi = [[int(v * d) for v in row] for row in fr]
    ci = charpoly_int(mi)
    n = len(a)
    # eigenvalues of d*a are d*lambda: p_a(x) = p_{da}(d x) / d^n
    return [Fraction(ci[k]) * Fraction(d) ** k / Fraction(d) ** n for k in range(n + 1)]


def _divisors(n: int) -> list[int]:
    n = abs(n)
    if n == 0:
        return []
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def _poly_eval_int(c, x):
    v = 0
    for coef in reversed(c):
        v = v * x + coef
    return v


def _deflate_linear(c, r):
    """Divide polynomial (low->high coefficients) by (x - r); exact."""
    n = len(c) - 1
    q = [0] * n
    acc = c[n]
    for k in range(n - 1, -1, -1):
        q[k] = acc
        acc = c[k] + acc * r
    if acc != 0:
        raise ArithmeticError("inexact deflation")
    return q


def _deflate_quadratic(c, s, p):
    """Divide by x^2 - s x + p (integers); exact or raises."""
    c = list(c)
    n = len(c) - 1
    q = [0] * (n - 1)
    for k in range(n, 1, -1):
        lead = c[k]
        q[k - 2] = lead
        c[k] -= lead
        c[k - 1] += lead * s
        c[k - 2] -= lead * p
    if c[0] != 0 or c[1] != 0:
        raise ArithmeticError("inexact deflation")
    return q


def integer_and_gaussian_roots(c: list[int]):
    """Roots of a monic integer polynomial that are integers or Gaussian integers.

    Returns (roots, remainder) where roots is a list of QI with multiplicity
    and remainder is the undivided integer cofactor (degree 0 when all roots
    were found).
    """
    c = list(c)
    roots: list[QI] = []
    while len(c) > 1 and c[0] == 0:
        roots.append(QI(0))
        c = c[1:]
    if len(c) == 1:
        return roots, c
    found = True
    while found and len(c) > 1:
        found = False
        for d in _divisors(c[0]):
            for r in (d, -d):
                if _poly_eval_int(c, r) == 0:
                    roots.append(QI(r))
                    c = _deflate_linear(c, r)
                    found = True
                    break
            if found:
                break
    # Gaussian pairs a +- b i: x^2 - 2a x + (a^2+b^2) divides p, so a^2+b^2 | c0
    cauchy = 1 + max((abs(v) for v in c[:-1]), default=0)
    found = True
    while found and len(c) > 2:
        found = False
        for nrm in _divisors(c[0]):
            if nrm > cauchy * cauchy:
                break
            b = 1
            while b * b <= nrm:
                a2 = nrm - b * b
                a = math.isqrt(a2)
                if a * a == a2:
                    for aa in ((a, -a) if a else (0,)):
                        try:
                            q = _deflate_quadratic(c, 2 * aa, nrm)
                        except ArithmeticError:
                            continue
                        roots.append(QI(aa, b))
                        roots.append(QI(aa, -b))
                        c = q
                        found = True
                        break
                if found:
                    break
                b += 1
            if found:
                break
    return roots, c


def exact_eigenvalues(a):
    """All eigenvalues of a rational matrix if they lie in Q(i), else None.

    Returns a list of (eigenvalue QI, algebraic multiplicity) sorted by
    (re, im), or None when some root is irrational.
    """
    fr = [[to_fraction(v) for v in row] for row in a]
    d = common_denominator(fr)
    mi = [[int(v * d) for v in row] for row in fr]
    ci = charpoly_int(mi)
    roots, rest = integer_and_gaussian_roots(ci)
    if len(rest) > 1:
        return None
    counts: dict[QI, int] = {}
    for r in roots:
        lam = QI(r.re / d, r.im / d)
        counts[lam] = counts.get(lam, 0) + 1
    return sorted(counts.items(), key=lambda kv: (kv[0].re, kv[0].im))


# ---------------------------------------------------------------------------
# vector normalization

def _lcm(a, b):
    return a * b // math.gcd(a, b)


def primitive_scale(v) -> QI:
    """Scale factor s such that s*v is a primitive Gaussian-integer vector
    whose leading nonzero entry is a positive rational integer."""
    lead = next((x for x in v if x), None)
    if lead is None:
        raise SpectralError("zero vector")
    s = lead.conj() / lead.norm2()  # makes the leading entry 1
    w = [x * s for x in v]
    den = 1
    for x in w:
        den = _lcm(den, x.re.denominator)
        den = _lcm(den, x.im.denominator)
    g = 0
    for x in w:
        g = math.gcd(g, int(x.re * den))
        g = math.gcd(g, int(x.im * den))
    return s * Fraction(den, g)


def as_complex_vector(v):
    import numpy as np
    return np.array([complex(x) for x in v], dtype=complex)
