"""System descriptions: x' = sum_j alpha_j(t) A_j x + f(t), plus optional reduction data."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, SpecError
from .scalar import ONE, ScalarExpr, format_scalar, parse_scalar

CLASSES = ("constant", "algebraic_reducible", "triangular", "lappo_danilevskii", "reducible")


@dataclass(frozen=True, eq=False)
class Reduction:
    """Transformation y = g(t) x taking the system to y' = B y (or (B/t) y)."""

    g: tuple  # n x n of ScalarExpr
    B: np.ndarray
    time_scale: str = "identity"  # or "log"
    group: str | None = None  # user's claim, metadata only

    def g_values(self, ts) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        n = len(self.g)
        G = np.empty((ts.shape[0], n, n))
        for i in range(n):
            for j in range(n):
                G[:, i, j] = self.g[i][j].evaluate_array(ts)
        return G


@dataclass(frozen=True, eq=False)
class SystemSpec:
    n: int
    terms: tuple  # of (alpha ScalarExpr, A ndarray)
    forcing: tuple | None = None
    reduction: Reduction | None = None
    window: tuple = (0.0, 1.0)
    class_hint: str | None = None
    t0: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise SpecError("dimension must be positive")
        if not self.terms:
            raise SpecError("at least one coefficient term is required")
        for alpha, A in self.terms:
            if not isinstance(alpha, ScalarExpr):
                raise SpecError("alpha must be a scalar expression")
            if np.shape(A) != (self.n, self.n):
                raise SpecError(f"coefficient matrix has shape {np.shape(A)}, expected {(self.n, self.n)}")
            if not np.all(np.isfinite(A)):
                raise SpecError("coefficient matrix has non-finite entries")
        if self.forcing is not None and len(self.forcing) != self.n:
            raise SpecError("forcing must have n components")
        lo, hi = self.window
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise SpecError("window must be a nonempty finite interval")
        if self.class_hint is not None and self.class_hint not in CLASSES:
            raise SpecError(f"unknown class_hint {self.class_hint!r}")
        if self.reduction is not None:
            r = self.reduction
            if len(r.g) != self.n or any(len(row) != self.n for row in r.g):
                raise SpecError("reduction g must be n x n")
            if np.shape(r.B) != (self.n, self.n):
                raise SpecError("reduction B must be n x n")
            if r.time_scale not in ("identity", "log"):
                raise SpecError("time_scale must be 'identity' or 'log'")
            if r.time_scale == "log" and lo <= 0:
                raise SpecError("log time scale needs a window inside t > 0")

    # -- convenience ---------------------------------------------------------------
    @property
    def anchor(self) -> float:
        """Quadrature anchor t0 (defaults to the window's left end)."""
        return float(self.window[0] if self.t0 is None else self.t0)

    @property
    def has_forcing(self) -> bool:
        if self.forcing is None:
            return False
        return any(not (f.is_constant() and f.constant_value() == 0.0) for f in self.forcing)

    @property
    def alphas(self):
        return [a for a, _ in self.terms]

    @property
    def matrices(self):
        return [np.asarray(A, dtype=float) for _, A in self.terms]

    def is_constant_coefficient(self) -> bool:
        return all(a.is_constant() for a in self.alphas)

    def constant_matrix(self) -> np.ndarray:
        """A when all alpha_j are constants."""
        if not self.is_constant_coefficient():
            raise SpecError("coefficients depend on t")
        A = np.zeros((self.n, self.n))
        for a, M in self.terms:
            A += a.constant_value() * np.asarray(M, dtype=float)
        return A

    def constant_matrix_exact(self):
        """A as nested lists of Fractions when alphas and entries are rational, else None."""
        from fractions import Fraction
        from . import exact as X
        if not self.is_constant_coefficient():
            return None
        acc = [[Fraction(0)] * self.n for _ in range(self.n)]
        for a, M in self.terms:
            c = a.constant_value()
            try:
                cf = X.to_fraction(c)
                Mf = [[X.to_fraction(v) for v in row] for row in np.asarray(M, float).tolist()]
            except ValueError:
                return None
            if cf.denominator > 10 ** 6 or any(v.denominator > 10 ** 6 for r in Mf for v in r):
                return None
            for i in range(self.n):
                for j in range(self.n):
                    acc[i][j] += cf * Mf[i][j]
        return acc

    def A_at(self, t) -> np.ndarray:
        """A(t) for scalar t, or a stack (N, n, n) for an array of times."""
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((ts.shape[0], self.n, self.n))
        for a, M in self.terms:
            out += a.evaluate_array(ts)[:, None, None] * np.asarray(M, dtype=float)
        return out[0] if np.ndim(t) == 0 else out

    def f_at(self, t) -> np.ndarray:
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros((ts.shape[0], self.n))
        if self.forcing is not None:
            for i, f in enumerate(self.forcing):
                out[:, i] = f.evaluate_array(ts)
        return out[0] if np.ndim(t) == 0 else out

    def rhs(self, t, x):
        """Vector field at (t, x); vectorized over leading axes."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return self.A_at(float(t)) @ x + self.f_at(float(t))
        A = self.A_at(t)
        return np.einsum("nij,nj->ni", A, x) + self.f_at(t)

    def homogeneous(self) -> "SystemSpec":
        return SystemSpec(self.n, self.terms, None, self.reduction, self.window, self.class_hint, self.t0)

    def with_terms(self, terms) -> "SystemSpec":
        return SystemSpec(self.n, tuple(terms), self.forcing, self.reduction, self.window,
                          self.class_hint, self.t0)

    # -- JSON ---------------------------------------------------------------------------
    @staticmethod
    def from_json(doc: dict) -> "SystemSpec":
        """Build from the documented JSON schema; raises SpecError on bad input."""
        if not isinstance(doc, dict):
            raise SpecError("spec must be a JSON object")
        known = {"n", "terms", "forcing", "reduction", "window", "class_hint", "t0", "name", "notes"}
        extra = set(doc) - known
        if extra:
            raise SpecError(f"unknown keys: {sorted(extra)}")
        try:
            n = doc["n"]
            if not isinstance(n, int) or isinstance(n, bool):
                raise SpecError("'n' must be an integer")
            terms = []
            for k, term in enumerate(doc["terms"]):
                alpha = _parse(term.get("alpha", "1"), f"terms[{k}].alpha")
                A = _matrix(term["A"], n, f"terms[{k}].A")
                terms.append((alpha, A))
            forcing = None
            if doc.get("forcing") is not None:
                forcing = tuple(_parse(s, f"forcing[{i}]") for i, s in enumerate(doc["forcing"]))
            reduction = None
            if doc.get("reduction") is not None:
                r = doc["reduction"]
                g = tuple(tuple(_parse(s, f"reduction.g[{i}][{j}]") for j, s in enumerate(row))
                          for i, row in enumerate(r["g"]))
                reduction = Reduction(g, _matrix(r["B"], n, "reduction.B"),
                                      r.get("time_scale", "identity"), r.get("group"))
            window = doc.get("window", [0.0, 1.0])
            if not (isinstance(window, list) and len(window) == 2):
                raise SpecError("'window' must be [t_lo, t_hi]")
            window = (float(window[0]), float(window[1]))
            t0 = doc.get("t0")
            return SystemSpec(n, tuple(terms), forcing, reduction, window,
                              doc.get("class_hint"), None if t0 is None else float(t0))
        except KeyError as e:
            raise SpecError(f"missing key {e.args[0]!r}") from None
        except (TypeError, ValueError) as e:
            if isinstance(e, SpecError):
                raise
            raise SpecError(str(e)) from None

    def to_json(self) -> dict:
        d = {"n": self.n,
             "terms": [{"alpha": format_scalar(a), "A": np.asarray(A, float).tolist()}
                       for a, A in self.terms]}
        if self.forcing is not None:
            d["forcing"] = [format_scalar(f) for f in self.forcing]
        if self.reduction is not None:
            r = self.reduction
            d["reduction"] = {"g": [[format_scalar(e) for e in row] for row in r.g],
                              "B": np.asarray(r.B, float).tolist(), "time_scale": r.time_scale}
        d["window"] = list(self.window)
        if self.class_hint is not None:
            d["class_hint"] = self.class_hint
        if self.t0 is not None:
            d["t0"] = self.t0
        return d


def _parse(s, where):
    if isinstance(s, (int, float)) and not isinstance(s, bool):
        s = repr(float(s)) if not float(s).is_integer() else str(int(s))
    if not isinstance(s, str):
        raise SpecError(f"{where}: expected an expression string")
    try:
        return parse_scalar(s)
    except ParseError as e:
        raise SpecError(f"{where}: {e}") from None


def _matrix(rows, n, where):
    try:
        A = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise SpecError(f"{where}: matrix entries must be numbers") from None
    if A.shape != (n, n):
        raise SpecError(f"{where}: expected {n}x{n}, got shape {A.shape}")
    return A


def constant_system(A, forcing=None, window=(0.0, 1.0), t0=None) -> SystemSpec:
    """Shorthand for x' = A x (+ f)."""
    A = np.asarray(A, dtype=float)
    f = None
    if forcing is not None:
        f = tuple(parse_scalar(s) if isinstance(s, str) else s for s in forcing)
    return SystemSpec(A.shape[0], ((ONE, A),), f, None, tuple(window), None, t0)
