"""Quadrature, trajectory integration and the verification oracle.

The oracle is deliberately independent of the constructions: it integrates
the ODE itself (Dormand-Prince 5(4) in :mod:`fint.kernels`) and checks that
each candidate F stays constant along the computed solutions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from .errors import DomainError, TrajectoryError, VerificationError
from .expr import EvalPoint, IntegralExpr, gradient
from .scalar import DEFAULT_QUAD_TOL, ScalarExpr, as_scalar

DEFAULT_RK_TOL = 1e-10
DEFAULT_SAMPLES = 200
DEFAULT_DRIFT_GATE = 1e-7
BAND = 1e-6


def adaptive_quad(f: ScalarExpr, a: float, b: float, tol: float = DEFAULT_QUAD_TOL) -> float:
    """Adaptive Simpson integral of a scalar function of t over [a, b].

    Uses the absolute+relative tolerance ``tol``; raises QuadratureError when
    the recursion passes depth 40 and DomainError at singular integrand values.
    """
    f = as_scalar(f)
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    try:
        ops, consts = f.compile()
    except ValueError:
        return sign * K.simpson_callable(lambda s: f.evaluate(s, tol), a, b, tol)
    return sign * K.simpson_program(ops, consts, a, b, tol)


# ---------------------------------------------------------------------------
# trajectories

@dataclass(frozen=True, eq=False)
class Trajectory:
    t: np.ndarray  # (N,)
    x: np.ndarray  # (N, n)
    steps: int = 0
    rejected: int = 0
    max_error: float = 0.0


def _pack(programs):
    """Concatenate bytecode programs into (ops, starts, consts)."""
    ops_all, consts_all, starts = [], [], [0]
    for e in programs:
        ops, consts = e.compile()
        ops = ops.copy()
        ops[1::2][ops[0::2] == K.OP_CONST] += len(consts_all)
        ops_all.extend(ops.tolist())
        consts_all.extend(consts.tolist())
        starts.append(len(ops_all))
    return (np.asarray(ops_all, dtype=np.int32), np.asarray(starts, dtype=np.int32),
            np.asarray(consts_all if consts_all else [0.0], dtype=float))


def integrate_trajectory(spec, x0, window=None, tol: float = DEFAULT_RK_TOL,
                         samples: int = DEFAULT_SAMPLES) -> Trajectory:
    """Solve the system from x0 at window[0]; states at samples+1 equispaced times.

    Steps land exactly on every sample time (no dense-output interpolation).
    """
    lo, hi = spec.window if window is None else window
    ts = np.linspace(float(lo), float(hi), int(samples) + 1)
    aops, astart, aconsts = _pack([a for a, _ in spec.terms])
    mats = np.array([np.asarray(A, dtype=float) for _, A in spec.terms])
    if spec.has_forcing:
        fops, fstart, fconsts = _pack(list(spec.forcing))
    else:
        fops, fstart, fconsts = np.zeros(0, np.int32), np.zeros(0, np.int32), np.zeros(1)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (spec.n,):
        raise ValueError(f"x0 must have length {spec.n}")
    out, (steps, rej, err) = K.dopri_linear(aops, astart, aconsts, mats, fops, fstart, fconsts,
                                            x0, ts, tol, tol)
    return Trajectory(ts, out, steps, rej, err)


# ---------------------------------------------------------------------------
# constancy

@dataclass
class ConstancyResult:
    max_drift: float
    rel_drift: float
    segments: int
    crossings: int
    points: int
    f0: float


def _valid_mask(F: IntegralExpr, t, x, quad_tol):
    """Points away from every singular set, plus sign-change split markers."""
    N = t.shape[0]
    ok = np.ones(N, dtype=bool)
    split = np.zeros(N, dtype=bool)
    crossings = 0
    for den, _ in F.singular_denominators():
        try:
            d = den.evaluate_many(t, x, quad_tol)
        except DomainError:
            d = np.array([_safe_eval(den, t[i], x[i], quad_tol) for i in range(N)])
        finite = np.isfinite(d)
        scale = max(1.0, float(np.max(np.abs(d[finite])))) if np.any(finite) else 1.0
        ok &= finite & (np.abs(d) >= BAND * scale)
        s = np.sign(np.where(finite, d, 0.0))
        change = np.zeros(N, dtype=bool)
        change[1:] = (s[1:] * s[:-1]) < 0
        crossings += int(np.sum(change))
        split |= change
    return ok, split, crossings


def _safe_eval(F, t, x, quad_tol):
    try:
        return F.evaluate(t, x, quad_tol)
    except DomainError:
        return float("nan")


def _segments(ok, split):
    segs, cur = [], []
    for i in range(len(ok)):
        if not ok[i] or split[i]:
            if len(cur) >= 2:
                segs.append(cur)
            cur = [i] if ok[i] else []
            continue
        cur.append(i)
    if len(cur) >= 2:
        segs.append(cur)
    return segs


def verify_constancy(F: IntegralExpr, traj: Trajectory, quad_tol: float = DEFAULT_QUAD_TOL) -> ConstancyResult:
    """Drift of F along a trajectory, per maximal segment avoiding its singular set.

    Raises:
        VerificationError: if no segment of two or more valid points remains.
    """
    t, x = traj.t, traj.x
    ok, split, crossings = _valid_mask(F, t, x, quad_tol)
    vals = np.full(t.shape[0], np.nan)
    idx = np.flatnonzero(ok)
    if idx.size:
        try:
            vals[idx] = F.evaluate_many(t[idx], x[idx], quad_tol)
        except DomainError:
            for i in idx:
                vals[i] = _safe_eval(F, t[i], x[i], quad_tol)
    ok &= np.isfinite(vals)
    segs = _segments(ok, split)
    if not segs:
        raise VerificationError("trajectory lies entirely inside the singular band")
    worst = worst_rel = 0.0
    f0 = float(vals[segs[0][0]])
    for seg in segs:
        v = vals[seg]
        d = np.abs(v - v[0])
        worst = max(worst, float(d.max()))
        worst_rel = max(worst_rel, float(d.max()) / (1.0 + abs(float(v[0]))))
    return ConstancyResult(worst, worst_rel, len(segs), crossings, int(sum(len(s) for s in segs)), f0)


def lie_residual(F: IntegralExpr, spec, t, x, quad_tol: float = DEFAULT_QUAD_TOL) -> float:
    """Scaled |dF/dt + grad F . (A(t) x + f)| at one point."""
    g = gradient(F, float(t), np.asarray(x, float), quad_tol)
    v = spec.rhs(float(t), np.asarray(x, float))
    r = g[0] + float(g[1:] @ v)
    scale = 1.0 + abs(g[0]) + float(np.linalg.norm(g[1:]) * np.linalg.norm(v))
    return abs(r) / scale


def eigen_identity_residual(p: IntegralExpr, lam: complex, spec, traj: Trajectory,
                            lam_fn=None, p_im: IntegralExpr | None = None) -> float:
    """max |d/dt p(x(t)) - lam p(x(t))| / (1 + |p|) along a trajectory.

    ``p_im`` is the imaginary part of a complex form (p is then its real
    part).  ``lam_fn(ts)`` overrides the constant eigenvalue, for
    eigenfunctions of time-varying systems.  d/dt is the five-point central
    difference of the sampled values (equispaced samples).
    """
    t, x = traj.t, traj.x
    v = p.evaluate_many(t, x).astype(complex)
    if p_im is not None:
        v = v + 1j * p_im.evaluate_many(t, x)
    h = t[1] - t[0]
    dv = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    mid = v[2:-2]
    lamv = np.full(dv.shape, complex(lam)) if lam_fn is None else lam_fn(t[2:-2])
    res = np.abs(dv - lamv * mid) / (1.0 + np.abs(mid))
    return float(res.max()) if res.size else 0.0


# ---------------------------------------------------------------------------
# independence

def jacobian(Fs, p: EvalPoint, quad_tol: float = DEFAULT_QUAD_TOL) -> np.ndarray:
    return np.array([gradient(F, p.t, np.asarray(p.x), quad_tol) for F in Fs]).reshape(len(Fs), -1)


def numeric_rank(J: np.ndarray, rel: float = 1e-6) -> int:
    """Rank by Gaussian elimination with full pivoting; rows pre-scaled to unit max."""
    M = np.array(J, dtype=float)
    if M.size == 0:
        return 0
    norms = np.max(np.abs(M), axis=1)
    nz = norms > 0
    M = M[nz] / norms[nz, None]
    r = 0
    first = None
    rows, cols = M.shape
    while r < min(rows, cols):
        sub = np.abs(M[r:, r:])
        i, j = np.unravel_index(int(np.argmax(sub)), sub.shape)
        piv = sub[i, j]
        if first is None:
            first = piv
        if piv <= rel * first or piv == 0:
            break
        i += r
        j += r
        M[[r, i]] = M[[i, r]]
        M[:, [r, j]] = M[:, [j, r]]
        M[r + 1:] -= np.outer(M[r + 1:, r] / M[r, r], M[r])
        r += 1
    return r


def independence_rank(Fs, p: EvalPoint, quad_tol: float = DEFAULT_QUAD_TOL, rel: float = 1e-6) -> int:
    """Numeric rank of the Jacobian [dF/dt, dF/dx] of Fs at p.

    Raises:
        DomainError: if p is on (or too close to) a singular set.
    """
    if not Fs:
        return 0
    for F in Fs:
        for den, _ in F.singular_denominators():
            d = den.evaluate(p.t, p.x, quad_tol)
            if abs(d) < BAND:
                raise DomainError("rank point is too close to a singular set")
    return numeric_rank(jacobian(Fs, p, quad_tol), rel)


# ---------------------------------------------------------------------------
# sampling and the verification harness

def _min_denominator(Fs, t0, x, quad_tol):
    worst = math.inf
    for F in Fs:
        for den, _ in F.singular_denominators():
            try:
                d = abs(den.evaluate(t0, x, quad_tol))
            except DomainError:
                return 0.0
            worst = min(worst, d)
        try:
            F.evaluate(t0, x, quad_tol)
        except DomainError:
            return 0.0
    return worst


def sample_x0(rng, n: int, Fs=(), t0: float = 0.0, min_den: float = 0.1, tries: int = 2000,
              quad_tol: float = DEFAULT_QUAD_TOL):
    """Uniform point in the unit ball with every singular denominator > min_den at t0.

    Falls back to the best candidate seen when none qualifies; returns
    (x0, achieved minimum denominator).
    """
    best, best_d = None, -1.0
    for _ in range(tries):
        d = rng.standard_normal(n)
        d /= np.linalg.norm(d)
        x = d * rng.random() ** (1.0 / n)
        m = _min_denominator(Fs, t0, x, quad_tol)
        if m > min_den:
            return x, m
        if m > best_d:
            best, best_d = x, m
    return best, best_d


@dataclass
class IntegralCheck:
    index: int
    tag: str
    formula: str
    max_drift: float = 0.0
    rel_drift: float = 0.0
    lie_residual: float = 0.0
    crossings: int = 0
    segments: int = 0
    failures: int = 0
    passed: bool = True
    notes: list = field(default_factory=list)


@dataclass
class VerificationReport:
    checks: list
    rank: int
    rank_point: tuple
    expected_rank: int
    trajectories: int
    tol: float
    passed: bool
    min_denominator: float = math.inf

    def offenders(self):
        return [c for c in self.checks if not c.passed]

    def to_json(self):
        return {
            "passed": self.passed,
            "rank": self.rank,
            "expected_rank": self.expected_rank,
            "rank_point": {"t": self.rank_point[0], "x": list(self.rank_point[1])},
            "trajectories": self.trajectories,
            "tol": self.tol,
            "integrals": [
                {"index": c.index, "tag": c.tag, "formula": c.formula, "max_drift": c.max_drift,
                 "rel_drift": c.rel_drift, "lie_residual": c.lie_residual,
                 "crossings": c.crossings, "segments": c.segments, "passed": c.passed,
                 "notes": list(c.notes)}
                for c in self.checks
            ],
        }


def verify_integrals(spec, Fs, tags=None, trajectories: int = 20, tol: float = DEFAULT_DRIFT_GATE,
                     seed: int = 0, rk_tol: float = DEFAULT_RK_TOL, quad_tol: float = DEFAULT_QUAD_TOL,
                     window=None, min_den: float = 0.1, samples: int = DEFAULT_SAMPLES,
                     check_rank: bool = True) -> VerificationReport:
    """Run the constancy oracle for a list of integrals on random trajectories.

    Each F passes when its relative drift stays below ``tol`` on every
    trajectory; the report passes when all F pass and the Jacobian rank at
    the first sampled point equals len(Fs).
    """
    Fs = list(Fs)
    tags = list(tags) if tags is not None else [""] * len(Fs)
    lo, hi = spec.window if window is None else window
    rng = np.random.default_rng(seed)
    checks = [IntegralCheck(i, tags[i], F.format()) for i, F in enumerate(Fs)]
    first_point = None
    min_seen = math.inf
    for _ in range(trajectories):
        x0, md = sample_x0(rng, spec.n, Fs, lo, min_den, quad_tol=quad_tol)
        min_seen = min(min_seen, md)
        if first_point is None:
            first_point = EvalPoint(lo, x0)
        traj = integrate_trajectory(spec, x0, (lo, hi), rk_tol, samples)
        mid = traj.t.shape[0] // 2
        for c, F in zip(checks, Fs):
            try:
                r = verify_constancy(F, traj, quad_tol)
            except VerificationError as e:
                c.notes.append(str(e))
                continue
            except DomainError as e:
                c.failures += 1
                c.notes.append(f"evaluation failed: {e}")
                continue
            c.max_drift = max(c.max_drift, r.max_drift)
            c.rel_drift = max(c.rel_drift, r.rel_drift)
            c.crossings += r.crossings
            c.segments += r.segments
            try:
                c.lie_residual = max(c.lie_residual, lie_residual(F, spec, traj.t[mid], traj.x[mid], quad_tol))
            except DomainError:
                pass
    for c in checks:
        c.passed = c.rel_drift <= tol and c.failures == 0 and c.segments > 0
    rank = -1
    if first_point is None:
        first_point = EvalPoint(lo, np.zeros(spec.n))
    if check_rank:
        try:
            rank = independence_rank(Fs, first_point, quad_tol)
        except DomainError:
            rank = -1
    passed = all(c.passed for c in checks) and (not check_rank or rank == len(Fs))
    return VerificationReport(checks, rank, (first_point.t, first_point.x), len(Fs), trajectories,
                              tol, passed, min_seen)


__all__ = [
    "adaptive_quad", "Trajectory", "integrate_trajectory", "ConstancyResult", "verify_constancy",
    "lie_residual", "eigen_identity_residual", "jacobian", "numeric_rank", "independence_rank",
    "sample_x0", "IntegralCheck", "VerificationReport", "verify_integrals", "TrajectoryError",
]
