"""Cumulative quadrature tables for running integrals ``int_{t0}^t g``.

The time axis is cut into fixed cells of width ``CELL`` starting at ``t0``
(in both directions).  Knot values (cumulative totals at cell ends) come
from adaptive Simpson on each cell; values inside a cell come from a
Chebyshev antiderivative of ``g`` on that cell, corrected linearly so that
it reproduces the Simpson total at the cell end.  Cells whose Chebyshev and
Simpson totals disagree are split recursively, and past the split limit the
query falls back to direct Simpson from the nearest knot.

Every value depends only on (g, t0, tol, t), never on query order, so
concurrent or repeated evaluation is deterministic.
"""
from __future__ import annotations

import math
import threading

import numpy as np
from numpy.polynomial import chebyshev as C

from . import kernels as K
from .errors import DomainError, QuadratureError

CELL = 1.0 / 16.0
CHEB_DEG = 24
MAX_SPLIT = 8


class _Piece:
    """Antiderivative model on [lo, hi] with value 0 at lo."""

    __slots__ = ("lo", "hi", "poly", "total", "children", "direct")

    def __init__(self, lo, hi):
        self.lo = lo
        self.hi = hi
        self.poly = None
        self.total = 0.0
        self.children = None
        self.direct = False


class CumulativeTable:
    """Lazily filled table of ``int_{t0}^t integrand(tau) dtau``."""

    def __init__(self, integrand, t0: float, tol: float):
        self.integrand = integrand
        self.t0 = float(t0)
        self.tol = float(tol)
        self._lock = threading.RLock()
        self._knots_pos = [0.0]  # cumulative value at t0 + k*CELL
        self._knots_neg = [0.0]  # cumulative value at t0 - k*CELL
        self._cells: dict[int, _Piece] = {}
        try:
            self._prog = integrand.compile()
        except ValueError:
            self._prog = None

    # -- integrand access ----------------------------------------------------
    def _simpson(self, a, b, tol):
        if self._prog is not None:
            return K.simpson_program(self._prog[0], self._prog[1], a, b, tol)
        return K.simpson_callable(lambda s: self.integrand.evaluate(s, self.tol), a, b, tol)

    def _cell_tol(self, width):
        return self.tol * max(width, 1e-3)

    # -- cell models ------------------------------------------------------------
    def _build_piece(self, lo, hi, depth):
        piece = _Piece(lo, hi)
        piece.total = self._simpson(lo, hi, self._cell_tol(hi - lo))
        try:
            with np.errstate(all="ignore"):
                cheb = C.Chebyshev.interpolate(
                    lambda s: self.integrand.evaluate_array(s, self.tol), CHEB_DEG, domain=[lo, hi])
            anti = cheb.integ(lbnd=lo)
            approx_total = float(anti(hi))
            ok = math.isfinite(approx_total) and (
                abs(approx_total - piece.total) <= 10.0 * self.tol * (1.0 + abs(piece.total)))
        except DomainError:
            ok, anti, approx_total = False, None, 0.0
        if ok:
            # linear correction makes the endpoint agree with Simpson
            piece.poly = (anti, piece.total - approx_total)
            return piece
        if depth >= MAX_SPLIT:
            piece.direct = True
            return piece
        mid = 0.5 * (lo + hi)
        left = self._build_piece(lo, mid, depth + 1)
        right = self._build_piece(mid, hi, depth + 1)
        piece.children = (left, right)
        piece.total = left.total + right.total
        return piece

    def _piece_value(self, piece, t):
        """Integral from piece.lo to t (lo <= t <= hi)."""
        if t == piece.lo:
            return 0.0
        if piece.children is not None:
            left, right = piece.children
            if t <= left.hi:
                return self._piece_value(left, t)
            return left.total + self._piece_value(right, t)
        if piece.direct:
            return self._simpson(piece.lo, t, self._cell_tol(t - piece.lo))
        anti, corr = piece.poly
        frac = (t - piece.lo) / (piece.hi - piece.lo)
        return float(anti(t)) + corr * frac

    def _cell(self, k):
        piece = self._cells.get(k)
        if piece is None:
            lo = self.t0 + k * CELL
            piece = self._build_piece(lo, lo + CELL, 0)
            self._cells[k] = piece
        return piece

    def _knot(self, k):
        """Cumulative value at t0 + k*CELL."""
        if k >= 0:
            knots = self._knots_pos
            while len(knots) <= k:
                j = len(knots) - 1
                knots.append(knots[-1] + self._cell(j).total)
            return knots[k]
        knots = self._knots_neg
        while len(knots) <= -k:
            j = len(knots)
            knots.append(knots[-1] - self._cell(-j).total)
        return knots[-k]

    # -- public -------------------------------------------------------------------
    def value(self, t: float) -> float:
        t = float(t)
        if t == self.t0:
            return 0.0
        if not math.isfinite(t):
            raise DomainError("non-finite time")
        with self._lock:
            k = math.floor((t - self.t0) / CELL)
            lo = self.t0 + k * CELL
            # guard against rounding placing t just outside the cell
            if t < lo:
                k -= 1
            elif t > lo + CELL:
                k += 1
            base = self._knot(k)
            return base + self._piece_value(self._cell(k), t)

    def values(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        flat = ts.ravel()
        out = np.empty(flat.shape)
        for i, t in enumerate(flat):
            out[i] = self.value(t)
        return out.reshape(ts.shape)


def running_integral(f, t0, tol):
    """Convenience wrapper: a callable t -> int_{t0}^t f for a ScalarExpr f."""
    tab = CumulativeTable(f, t0, tol)
    return tab.value


__all__ = ["CumulativeTable", "running_integral", "CELL", "QuadratureError"]
