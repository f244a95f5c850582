"""Basis results and the greedy independence selector shared by all constructors."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConstructionError, DomainError
from .expr import IntegralExpr, gradient
from .numerics import numeric_rank
from .scalar import DEFAULT_QUAD_TOL

MODES = ("autonomous", "full", "forced")

# points closer than this to a singular set are not used for rank decisions
RANK_BAND = 1e-6


@dataclass(frozen=True)
class Candidate:
    F: IntegralExpr
    tag: str


@dataclass
class BasisResult:
    """Ordered integrals with provenance tags and singular-set descriptions."""

    integrals: list
    provenance: list
    mode: str
    singular_sets: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    kind: str = "constant"

    def __post_init__(self):
        if not self.singular_sets:
            self.singular_sets = [F.singular_description() for F in self.integrals]

    def __len__(self):
        return len(self.integrals)

    def in_singular_set(self, i: int, t: float, x, band: float = RANK_BAND) -> bool:
        """Machine predicate: is (t, x) within ``band`` of integral i's singular set?"""
        for den, _ in self.integrals[i].singular_denominators():
            try:
                if abs(den.evaluate(t, x)) <= band:
                    return True
            except DomainError:
                return True
        return False

    def formatted(self):
        return [F.format() for F in self.integrals]

    def to_json(self):
        return {
            "mode": self.mode,
            "class": self.kind,
            "integrals": [
                {"index": i, "tag": tag, "formula": F.format(), "singular_set": list(sing),
                 "tree": F.to_json()}
                for i, (F, tag, sing) in enumerate(zip(self.integrals, self.provenance,
                                                       self.singular_sets))
            ],
            "notes": list(self.notes),
        }


def rank_points(n: int, t0: float, count: int = 4, seed: int = 20240611):
    """Fixed pseudo-random evaluation points used for selection decisions."""
    rng = np.random.default_rng(seed)
    return [(float(t0), rng.standard_normal(n)) for _ in range(count)]


def _row(F, t, x, quad_tol):
    try:
        for den, _ in F.singular_denominators():
            if abs(den.evaluate(t, x, quad_tol)) <= RANK_BAND * (1.0 + float(np.abs(x).max())):
                return None
        row = gradient(F, t, x, quad_tol)
    except DomainError:
        return None
    if not np.all(np.isfinite(row)):
        return None
    return row


class Selector:
    """Greedy selection: accept a candidate when it raises the Jacobian rank.

    Rank is tested at a few fixed points; a candidate counts as independent
    when some point (where every selected integral is defined) shows the
    rank increase.
    """

    def __init__(self, n: int, t0: float, quad_tol: float = DEFAULT_QUAD_TOL, points=None):
        self.points = points if points is not None else rank_points(n, t0)
        self.quad_tol = quad_tol
        self.chosen: list[Candidate] = []
        self._rows: list[list] = []  # per chosen candidate: row per point (or None)

    def __len__(self):
        return len(self.chosen)

    def offer(self, cand: Candidate) -> bool:
        rows = [_row(cand.F, t, x, self.quad_tol) for t, x in self.points]
        k = len(self.chosen)
        for j, r in enumerate(rows):
            if r is None or any(rr[j] is None for rr in self._rows):
                continue
            J = np.array([rr[j] for rr in self._rows] + [r])
            if numeric_rank(J) == k + 1:
                self.chosen.append(cand)
                self._rows.append(rows)
                return True
        return False

    def fill(self, cands, target: int) -> None:
        for c in cands:
            if len(self.chosen) >= target:
                return
            self.offer(c)

    def result(self, mode: str, target: int, kind: str = "constant", notes=()) -> BasisResult:
        if len(self.chosen) < target:
            got = ", ".join(c.tag for c in self.chosen) or "none"
            raise ConstructionError(
                f"only {len(self.chosen)} independent integrals found, {target} required "
                f"(selected: {got})")
        return BasisResult([c.F for c in self.chosen], [c.tag for c in self.chosen], mode,
                           notes=list(notes), kind=kind)


def check_independent(Fs, tags, n: int, t0: float, quad_tol: float = DEFAULT_QUAD_TOL) -> None:
    """Raise ConstructionError naming the dependent subset when Fs lose rank."""
    sel = Selector(n, t0, quad_tol)
    dropped = [tag for F, tag in zip(Fs, tags) if not sel.offer(Candidate(F, tag))]
    if dropped:
        raise ConstructionError(f"integrals are not functionally independent: {', '.join(dropped)}")


__all__ = ["BasisResult", "Candidate", "Selector", "MODES", "rank_points", "check_independent"]
