"""First integrals of systems reduced to constant coefficients by y = g(t) x.

The user supplies g and B with g' = B g - g A (or g' = B g / t - g A for
the log time scale, where the reduced clock is s = ln t).  Every constant
coefficient construction then applies to the forms nu g(t) x of the chains
of C = B^T, with the forcing routed through g.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import scalar as S
from .autonomous import (Frame, autonomous_candidates, forced_candidates, time_candidates)
from .errors import ConstructionError
from .result import BasisResult, MODES, Selector
from .spectral import spectrum_of_transpose
from .system import SystemSpec

GRID = 50


@dataclass(frozen=True)
class ReductionReport:
    """max over the grid of |g' - B g + g A| (Frobenius), the scale |B g| + |g A|, and min |det g|."""

    residual: float
    scale: float
    min_det: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol * (1.0 + self.scale) and self.min_det > 1e-12


def _grid(spec: SystemSpec, points: int):
    lo, hi = spec.window
    return np.linspace(lo, hi, points)


def check_reduction(spec: SystemSpec, tol: float = 1e-8, points: int = GRID) -> ReductionReport:
    """Residual of the reduction identity on a grid; g' by central differences."""
    r = spec.reduction
    if r is None:
        raise ConstructionError("no reduction (g, B) was supplied")
    ts = _grid(spec, points)
    eps = np.finfo(float).eps
    h = eps ** (1 / 3) * (1.0 + np.abs(ts))
    G = r.g_values(ts)
    dG = (r.g_values(ts + h) - r.g_values(ts - h)) / (((ts + h) - (ts - h))[:, None, None])
    B = np.asarray(r.B, dtype=float)
    A = spec.A_at(ts)
    BG = np.einsum("ij,njk->nik", B, G)
    if r.time_scale == "log":
        BG = BG / ts[:, None, None]
    GA = np.einsum("nij,njk->nik", G, A)
    R = dG - BG + GA
    residual = float(np.max(np.linalg.norm(R, axis=(1, 2))))
    scale = float(np.max(np.linalg.norm(BG, axis=(1, 2)) + np.linalg.norm(GA, axis=(1, 2))))
    min_det = float(np.min(np.abs(np.linalg.det(G))))
    return ReductionReport(residual, scale, min_det, tol)


def reduced_forcing(spec: SystemSpec):
    """g(t) f(t) as a tuple of ScalarExpr."""
    g = spec.reduction.g
    out = []
    for i in range(spec.n):
        acc = S.ZERO
        for k, fk in enumerate(spec.forcing):
            acc = S.add(acc, S.mul(g[i][k], fk))
        out.append(acc)
    return tuple(out)


def reduced_frame(spec: SystemSpec) -> Frame:
    r = spec.reduction
    forcing = reduced_forcing(spec) if spec.has_forcing else None
    return Frame(r.g, r.time_scale == "log", spec.anchor, forcing, "reduced-")


def reducible_integrals(spec: SystemSpec, mode: str | None = None, tol: float = 1e-8) -> BasisResult:
    """n integrals of a reducible system.

    Homogeneous ("full"): forms nu g(t) x against the reduced clock first
    (nu g x e^{-lam s}, nu^1 g x / nu^0 g x - s and their complex splits),
    then the clock-free forms of the reduced system.  Forced: the chain
    recursions with the forcing g f.
    """
    rep = check_reduction(spec, tol)
    if not rep.passed:
        if rep.min_det <= 1e-12:
            raise ConstructionError("g(t) is singular on the window")
        raise ConstructionError(f"the reduction identity fails: residual {rep.residual:.3g}")
    if mode is None:
        mode = "forced" if spec.has_forcing else "full"
    if mode not in MODES:
        raise ConstructionError(f"unknown mode {mode!r}")
    if mode == "autonomous":
        raise ConstructionError("integrals of a reducible system carry t through g(t); "
                                "use mode 'full'")
    if spec.has_forcing and mode != "forced":
        raise ConstructionError("the system has forcing: only mode 'forced' applies")
    B = np.asarray(spec.reduction.B, dtype=float)
    data = spectrum_of_transpose(B.tolist(), tol)
    frame = reduced_frame(spec)
    sel = Selector(spec.n, spec.anchor)
    if mode == "forced":
        sel.fill(forced_candidates(data, frame), spec.n)
    else:
        sel.fill(time_candidates(data, frame) + autonomous_candidates(data, frame), spec.n)
    return sel.result(mode, spec.n, "reducible")


__all__ = ["ReductionReport", "check_reduction", "reduced_forcing", "reduced_frame",
           "reducible_integrals"]
