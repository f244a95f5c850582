"""First integrals of systems x' = sum_j alpha_j(t) A_j x (+ f(t)) with t-dependent coefficients.

Three families are handled:

* algebraic reducible: B(t) = A(t)^T has constant eigenvectors nu, so
  d/dt (nu x) = lam(t) nu x with lam(t) = sum_j lam^j alpha_j(t);
* upper triangular A(t): solved bottom-up with nested quadratures;
* Lappo-Danilevskii: the A_j commute.  Common eigenvectors give partial
  integrals; chains of a designated B_zeta give Psi functions whose
  derivatives along every A_j x are constants mu.

The autonomous integrals of a Lappo-Danilevskii system use the same rates:
log|nu x|, arg(nu x) and Psi advance along A_j x at constant rates, so any
combination whose rate vector vanishes for every j is constant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact as X
from . import scalar as S
from .autonomous import (_form_dot_forcing, _lincomb, _minus, _modulus2, _times)
from .errors import ClassificationError, ConstructionError, SpectralError
from .expr import (Arctan, Exp, IntegralExpr, LinForm, Psi, ScalarLift, Sub, complex_linform,
                   gradient, product_of_powers, scaled)
from .result import BasisResult, Candidate, MODES, Selector
from .spectral import (CommonSpectrum, EigenChain, common_spectrum, commutator_norm)
from .system import SystemSpec

TAGS = {
    "algebraic-reducible": "constant eigenvector form against the integrated eigenfunction",
    "triangular": "bottom-up recursion for an upper triangular system",
    "ld-eigen": "common eigenvector form against the integrated eigenfunction",
    "ld-chain": "chain Psi function minus its integrated rate",
    "ld-forced-chain": "chain recursion with K and C quadratures",
    "ld-autonomous": "product of common partial integrals with exponents from the rate system",
}

ZERO_TOL = 1e-9
MU_TOL = 1e-6
MU_POINTS = 8
FROZEN_TOL = 1e-5
FROZEN_POINTS = 20
GRAM_WARN = 1e-10
SEED = 20240611


# ---------------------------------------------------------------------------
# coefficient data

def normalized_terms(spec: SystemSpec):
    """Terms with constant alphas merged into one alpha = 1 term and repeated alphas merged."""
    const = np.zeros((spec.n, spec.n))
    has_const = False
    merged: list[list] = []
    for a, A in spec.terms:
        A = np.asarray(A, dtype=float)
        if a.is_constant():
            const += a.constant_value() * A
            has_const = True
            continue
        key = S.format_scalar(a)
        for item in merged:
            if item[0] == key:
                item[2] = item[2] + A
                break
        else:
            merged.append([key, a, A.copy()])
    out = []
    if has_const and np.any(const):
        out.append((S.ONE, const))
    out += [(a, A) for _, a, A in merged if np.any(A)]
    if not out:
        out = [(S.ONE, np.zeros((spec.n, spec.n)))]
    return out


def entry_exprs(spec: SystemSpec):
    """a_ij(t) = sum_k alpha_k(t) (A_k)_ij as ScalarExpr."""
    n = spec.n
    terms = normalized_terms(spec)
    return [[_combo([A[i, j] for _, A in terms], [a for a, _ in terms]) for j in range(n)]
            for i in range(n)]


def _combo(coeffs, alphas) -> S.ScalarExpr:
    """sum c_j alpha_j(t) with zero coefficients dropped."""
    acc = S.ZERO
    for c, a in zip(coeffs, alphas):
        c = float(c)
        if c == 0.0:
            continue
        if c < 0 and not (isinstance(acc, S.Const) and acc.value == 0.0):
            acc = S.sub(acc, S.mul(-c, a))
        else:
            acc = S.add(acc, S.mul(c, a))
    return acc


def alpha_gram_condition(spec: SystemSpec, samples: int = 64) -> float:
    """Smallest/largest eigenvalue of the normalized Gram matrix of the alphas on the window."""
    terms = normalized_terms(spec)
    if len(terms) < 2:
        return 1.0
    ts = np.linspace(spec.window[0], spec.window[1], samples)
    V = np.array([a.evaluate_array(ts) for a, _ in terms]).T
    norms = np.linalg.norm(V, axis=0)
    norms[norms == 0] = 1.0
    G = (V / norms).T @ (V / norms)
    w = np.linalg.eigvalsh(G)
    return float(w[0] / w[-1]) if w[-1] > 0 else 0.0


# ---------------------------------------------------------------------------
# classification

@dataclass
class Classification:
    kind: str
    evidence: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def lines(self):
        out = [f"class: {self.kind}"]
        for k, v in self.evidence.items():
            out.append(f"  {k}: {v}")
        out += [f"  note: {s}" for s in self.notes]
        return out


def _is_upper(mats, tol):
    return all(np.max(np.abs(np.tril(A, -1)), initial=0.0) <= tol for A in mats)


def _constant_eigenvectors(spec, tol):
    """Common eigenvectors of the B_j (no commuting requirement), or None."""
    mats = [A.T for _, A in normalized_terms(spec)]
    try:
        return common_spectrum(mats, tol, require_commuting=False)
    except SpectralError:
        return None


def _check_parallel(spec, cs, samples=16):
    """max over sampled t and eigenvectors of |B(t) nu - lam(t) nu| / (1 + |B(t)| |nu|)."""
    ts = np.linspace(spec.window[0], spec.window[1], samples)
    worst = 0.0
    for t in ts:
        B = spec.A_at(float(t)).T
        for e in cs.eigen:
            v = e.vector
            w = B @ v
            lam = np.vdot(v, w) / np.vdot(v, v)
            worst = max(worst, float(np.linalg.norm(w - lam * v) /
                                     (1.0 + np.linalg.norm(B) * np.linalg.norm(v))))
    return worst


def classify_system(spec: SystemSpec, tol: float = 1e-8) -> Classification:
    """Best matching class with diagnostic evidence.

    The user's ``class_hint`` is honoured when its test passes; otherwise
    the classes are tried in the order constant, reducible,
    lappo_danilevskii, triangular, algebraic_reducible.
    """
    ev: dict = {}
    notes: list = []
    terms = normalized_terms(spec)
    mats = [A for _, A in terms]
    scale = max(max(np.linalg.norm(A, 2) for A in mats), 1.0)
    ev["terms"] = len(terms)
    constant = spec.is_constant_coefficient()
    ev["constant coefficients"] = constant
    if len(terms) > 1:
        g = alpha_gram_condition(spec)
        ev["alpha gram condition"] = f"{g:.3g}"
        if g < GRAM_WARN:
            notes.append("the alpha functions are nearly linearly dependent on the window")
    checks = {}
    checks["constant"] = lambda: constant
    if spec.reduction is not None:
        from .reducible import check_reduction
        rep = check_reduction(spec, tol=float("inf"))
        ev["reduction residual"] = f"{rep.residual:.3g}"
        ev["min |det g|"] = f"{rep.min_det:.3g}"
        red_ok = rep.residual <= max(tol, 1e-8) * (1.0 + rep.scale) and rep.min_det > 1e-12
        checks["reducible"] = lambda: red_ok
    else:
        checks["reducible"] = lambda: False
    comm = commutator_norm(mats)
    ev["commutator norm"] = f"{comm:.3g}"
    checks["lappo_danilevskii"] = lambda: comm <= max(tol, 1e-10) * scale * scale
    upper = _is_upper(mats, 0.0)
    ev["upper triangular"] = upper
    checks["triangular"] = lambda: upper

    def alg():
        cs = _constant_eigenvectors(spec, tol)
        if cs is None:
            ev["constant eigenvectors"] = 0
            return False
        ev["constant eigenvectors"] = len(cs.eigen)
        res = _check_parallel(spec, cs)
        ev["eigenvector residual on window"] = f"{res:.3g}"
        return res <= 1e-8
    checks["algebraic_reducible"] = alg

    order = ["constant", "reducible", "lappo_danilevskii", "triangular", "algebraic_reducible"]
    if spec.class_hint is not None:
        if checks[spec.class_hint]():
            return Classification(spec.class_hint, ev, notes + ["class taken from class_hint"])
        notes.append(f"class_hint {spec.class_hint!r} failed its test; auto-detecting")
    for kind in order:
        if checks[kind]():
            return Classification(kind, ev, notes)
    raise ClassificationError("no supported class matches: coefficient matrices do not commute, "
                              "are not upper triangular and share no constant eigenvector")


# ---------------------------------------------------------------------------
# complex scalar pairs: re + i im of functions of t

@dataclass(frozen=True)
class _C:
    re: S.ScalarExpr
    im: S.ScalarExpr = S.ZERO

    def __add__(self, o):
        return _C(S.add(self.re, o.re), S.add(self.im, o.im))

    def __mul__(self, o):
        return _C(S.sub(S.mul(self.re, o.re), S.mul(self.im, o.im)),
                  S.add(S.mul(self.re, o.im), S.mul(self.im, o.re)))

    def scale(self, c):
        c = complex(c)
        return _C(S.sub(S.mul(c.real, self.re), S.mul(c.imag, self.im)),
                  S.add(S.mul(c.real, self.im), S.mul(c.imag, self.re)))

    def integral(self, t0):
        return _C(S.integral(self.re, t0), S.integral(self.im, t0))

    def is_zero(self):
        return all(isinstance(e, S.Const) and e.value == 0.0 for e in (self.re, self.im))


def _rate(coeffs, alphas) -> _C:
    """sum_j c_j alpha_j(t) for complex c_j."""
    coeffs = [complex(c) for c in coeffs]
    return _C(_combo([c.real for c in coeffs], alphas), _combo([c.imag for c in coeffs], alphas))


def _decay(lam: _C, t0) -> _C:
    """exp(-int_{t0}^t lam)."""
    L = lam.integral(t0)
    E = S.call("exp", S.neg(L.re))
    if isinstance(L.im, S.Const) and L.im.value == 0.0:
        return _C(E)
    return _C(S.mul(E, S.call("cos", L.im)), S.neg(S.mul(E, S.call("sin", L.im))))


# complex pairs of IntegralExpr nodes (im None means zero)

def _cnode_times(re, im, c: _C):
    """(re + i im) * c as a pair of nodes."""
    def t(node, s):
        if node is None or (isinstance(s, S.Const) and s.value == 0.0):
            return None
        return _times(node, s)

    def comb(a, b, sign):
        if a is None:
            return b if (b is None or sign > 0) else scaled(-1.0, b)
        if b is None:
            return a
        return _lincomb([(1.0, a), (float(sign), b)])
    return comb(t(re, c.re), t(im, c.im), -1), comb(t(re, c.im), t(im, c.re), 1)


def _cnode_sub(a, b):
    if b is None:
        return a
    if a is None:
        return scaled(-1.0, b)
    return Sub(a, b)


def _cnode_minus_scalar(node, s: S.ScalarExpr):
    if isinstance(s, S.Const) and s.value == 0.0:
        return node
    if node is None:
        return ScalarLift(S.neg(s))
    return _minus(node, s)


# ---------------------------------------------------------------------------
# eigenvector integrals (shared by the algebraic reducible and commuting cases)

def _eigen_integrals(vec, exact, lams, alphas, forcing, t0, tag):
    re, im = complex_linform(vec, None, exact)
    lam = _rate(lams, alphas)
    if forcing is None:
        L = lam.integral(t0)
        if im is None:
            return [(_times(re, S.call("exp", S.neg(L.re))), tag)]
        M = _modulus2(re, im)
        F1 = _times(M, S.call("exp", S.mul(-2.0, L.re)))
        F2 = _minus(Arctan(im, re), L.im)
        return [(F1, tag), (F2, tag)]
    phi = _decay(lam, t0)
    xr, xi = _cnode_times(re, im, phi)
    u = _C(_form_dot_forcing(np.real(vec), forcing), _form_dot_forcing(np.imag(vec), forcing))
    Cq = (u * phi).integral(t0)
    out = [(_cnode_minus_scalar(xr, Cq.re), tag)]
    if im is not None:
        out.append((_cnode_minus_scalar(xi, Cq.im), tag))
    return out


def _representatives(cs: CommonSpectrum):
    """Common eigenvectors, keeping one of each conjugate pair."""
    out = []
    for e in cs.eigen:
        if not e.is_real and any(_parallel(np.conj(e.vector), o.vector) for o in out):
            continue
        out.append(e)
    return out


def _parallel(u, v, tol=1e-8):
    M = np.array([u, v])
    return np.linalg.matrix_rank(M, tol * max(1.0, np.abs(M).max())) == 1


def _exact_of(e):
    if e.exact_vector is None:
        return None
    return tuple(X.QI.of(v) for v in e.exact_vector)


def _check_mode(spec, mode, autonomous_ok=False):
    if mode is None:
        mode = "forced" if spec.has_forcing else "full"
    if mode not in MODES:
        raise ConstructionError(f"unknown mode {mode!r}")
    if mode == "autonomous" and not autonomous_ok:
        raise ConstructionError("autonomous integrals are only constructed for constant and "
                                "Lappo-Danilevskii systems")
    if spec.has_forcing and mode != "forced":
        raise ConstructionError("the system has forcing: only mode 'forced' applies")
    return mode


def algebraic_reducible_integrals(spec: SystemSpec, mode: str | None = None,
                                  tol: float = 1e-8) -> BasisResult:
    """n integrals nu x phi(t) - int nu f phi from constant eigenvectors of B(t).

    phi = exp(-int lam), lam(t) = sum_j lam^j alpha_j(t).  A complex nu gives
    two real integrals (modulus and phase when f = 0).
    """
    mode = _check_mode(spec, mode)
    cs = _constant_eigenvectors(spec, tol)
    if cs is None:
        raise ConstructionError("B(t) has no constant eigenvector")
    terms = normalized_terms(spec)
    alphas = [a for a, _ in terms]
    forcing = spec.forcing if spec.has_forcing else None
    cands = []
    for e in _representatives(cs):
        pairs = _eigen_integrals(e.vector, _exact_of(e), e.lams, alphas, forcing, spec.anchor,
                                 "algebraic-reducible")
        cands += [Candidate(F, tag) for F, tag in pairs]
    sel = Selector(spec.n, spec.anchor)
    sel.fill(cands, spec.n)
    if len(sel) < spec.n:
        raise ConstructionError(f"eigenvector deficiency: the constant eigenvectors give "
                                f"{len(sel)} independent integrals, {spec.n} required")
    return sel.result(mode, spec.n, "algebraic_reducible")


# ---------------------------------------------------------------------------
# triangular systems

def triangular_integrals(spec: SystemSpec, mode: str | None = None) -> BasisResult:
    """Bottom-up integrals of an upper triangular system.

    With i = n + 1 - tau, phi_i = exp(-int a_ii) and psi_i = 1/phi_i:

        F_tau = x_i phi_i - sum_{xi < tau} A_{tau,xi} F_xi - B_tau,
        A_{tau,xi} = int phi_i sum_{k=1}^{tau-xi} a_{i,i+k} psi_{i+k} A_{tau-k,xi},
        B_tau = int phi_i (f_i + sum_{xi < tau} a_{i,i+xi} psi_{i+xi} B_{tau-xi}),

    with A_{zeta,zeta} = 1.  All quadratures start at the anchor, so
    F_tau(t0, x) = x_i exactly.
    """
    mode = _check_mode(spec, mode)
    mats = [A for _, A in normalized_terms(spec)]
    if not _is_upper(mats, 0.0):
        raise ConstructionError("the coefficient matrix is not upper triangular")
    n, t0 = spec.n, spec.anchor
    a = entry_exprs(spec)
    f = spec.forcing if spec.has_forcing else None
    phi, psi = [], []
    for i in range(n):
        L = S.integral(a[i][i], t0)
        phi.append(S.call("exp", S.neg(L)))
        psi.append(S.call("exp", L))
    Acoef = {}
    Bcoef = {}
    Fs = []

    def A_of(z, xi):
        return S.ONE if z == xi else Acoef.get((z, xi), S.ZERO)

    for tau in range(1, n + 1):
        i = n - tau  # 0-based row of x_{n+1-tau}
        for xi in range(1, tau):
            integrand = S.ZERO
            for k in range(1, tau - xi + 1):
                integrand = S.add(integrand, S.mul(S.mul(a[i][i + k], psi[i + k]), A_of(tau - k, xi)))
            Acoef[(tau, xi)] = S.integral(S.mul(integrand, phi[i]), t0)
        integrand = f[i] if f is not None else S.ZERO
        for xi in range(1, tau):
            integrand = S.add(integrand, S.mul(S.mul(a[i][i + xi], psi[i + xi]), Bcoef[tau - xi]))
        Bcoef[tau] = S.integral(S.mul(integrand, phi[i]), t0)
        e = np.zeros(n)
        e[i] = 1.0
        F = _times(LinForm(e), phi[i])
        terms = [(1.0, _times(Fs[xi - 1], Acoef[(tau, xi)])) for xi in range(1, tau)
                 if not _is_zero(Acoef[(tau, xi)])]
        if terms:
            F = Sub(F, _lincomb(terms))
        Fs.append(_minus(F, Bcoef[tau]))
    return BasisResult(Fs, ["triangular"] * n, mode, kind="triangular")


def _is_zero(e):
    return isinstance(e, S.Const) and e.value == 0.0


# ---------------------------------------------------------------------------
# Lappo-Danilevskii chains

def psi_lie_derivatives(vectors, A, x):
    """Psi_k and their derivatives along A x (k = 1..s-1), both complex, for points x (N, n).

    Differentiates the triangular system nu^k x = sum C(k-1,tau-1) Psi_tau nu^{k-tau} x.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    Ax = x @ np.asarray(A, dtype=float).T
    p = [x @ v for v in vectors]
    dp = [Ax @ v for v in vectors]
    psi, dpsi = [None], [None]
    for k in range(1, len(vectors)):
        acc, dacc = p[k].astype(complex), dp[k].astype(complex)
        for tau in range(1, k):
            c = math.comb(k - 1, tau - 1)
            acc = acc - c * psi[tau] * p[k - tau]
            dacc = dacc - c * (dpsi[tau] * p[k - tau] + psi[tau] * dp[k - tau])
        val = acc / p[0]
        psi.append(val)
        dpsi.append((dacc - val * dp[0]) / p[0])
    return psi[1:], dpsi[1:]


def _snap(z: complex, den: int = 1000, tol: float = 1e-11) -> complex:
    """Round each part to a nearby small-denominator rational when within tol."""
    def r(v):
        q = Fraction(v).limit_denominator(den)
        return float(q) if abs(float(q) - v) <= tol * (1 + abs(v)) else v
    return complex(r(z.real), r(z.imag))


@dataclass
class LDChainData:
    """One chain of B_zeta whose nu^0 is a common eigenvector.

    ``mu[theta][j]`` is the constant derivative of Psi_theta along A_j x
    (mu[0] holds the eigenvalues lam^j of nu^0).
    """

    chain: EigenChain
    zeta: int
    mu: np.ndarray  # complex, shape (s, m)
    spread: float
    valid: bool

    @property
    def s(self):
        return self.chain.m

    @property
    def is_real(self):
        return self.chain.is_real and not np.any(np.imag(self.mu))

    def psi(self, theta: int, part: str = "re") -> Psi:
        return Psi(self.chain.vectors, theta, part)


def ld_chain_data(chain: EigenChain, mats, zeta: int, points: int = MU_POINTS,
                  seed: int = SEED) -> LDChainData:
    """Compute the mu constants of a chain and check that they are constant."""
    rng = np.random.default_rng(seed)
    nu0 = chain.vectors[0]
    n = nu0.shape[0]
    xs = []
    while len(xs) < points:
        x = rng.standard_normal(n)
        if abs(x @ nu0) > 0.1 * np.linalg.norm(nu0):
            xs.append(x)
    xs = np.array(xs)
    m = len(mats)
    mu = np.zeros((chain.m, m), dtype=complex)
    spread = 0.0
    for j, A in enumerate(mats):
        B = np.asarray(A, dtype=float).T
        mu[0, j] = _snap(complex(np.vdot(nu0, B @ nu0) / np.vdot(nu0, nu0)))
        if chain.m > 1:
            _, d = psi_lie_derivatives(chain.vectors, A, xs)
            for k, vals in enumerate(d, start=1):
                mean = complex(np.mean(vals))
                spread = max(spread, float(np.max(np.abs(vals - mean)) / (1 + abs(mean))))
                mu[k, j] = _snap(mean)
    return LDChainData(chain, zeta, mu, spread, spread <= MU_TOL)


def _ld_setup(spec, tol):
    terms = normalized_terms(spec)
    mats = [A for _, A in terms]
    alphas = [a for a, _ in terms]
    Bs = [A.T for A in mats]
    try:
        cs = common_spectrum(Bs, tol, require_commuting=True, designate=True)
    except SpectralError as e:
        raise ConstructionError(f"not a Lappo-Danilevskii family: {e}") from None
    chains = [ld_chain_data(c, mats, cs.zeta) for c in cs.chains if c.lam.imag >= 0]
    return mats, alphas, cs, chains


def _chain_notes(chains):
    notes = []
    for d in chains:
        if not d.valid:
            notes.append(f"chain of length {d.s} withheld: the derivatives of its Psi functions "
                         f"along the A_j x are not constant (spread {d.spread:.2g})")
    return notes


def _ld_chain_homogeneous(d: LDChainData, alphas, t0):
    out = []
    for theta in range(1, d.s):
        rate = _rate(d.mu[theta], alphas).integral(t0)
        out.append((_minus(d.psi(theta, "re"), rate.re), "ld-chain"))
        if not d.is_real:
            out.append((_minus(d.psi(theta, "im"), rate.im), "ld-chain"))
    return out


def _ld_chain_forced(d: LDChainData, alphas, forcing, t0):
    """The recursion F_theta = nu^theta x phi - sum_{r<theta} K^theta_r F_r - C_theta.

    K^theta_r = int sum_{rho=1}^{theta-r} C(theta,rho) mu_rho K^{theta-rho}_r (K^r_r = 1),
    C_theta = int (nu^theta f phi + sum_{rho=1}^theta C(theta,rho) mu_rho C_{theta-rho}).
    """
    mus = [_rate(d.mu[k], alphas) for k in range(d.s)]
    phi = _decay(mus[0], t0)
    K: dict = {}
    Cs = []
    Fs = []  # complex node pairs
    out = []
    for theta in range(d.s):
        v = d.chain.vectors[theta]
        ex = d.chain.exact_vectors[theta] if d.chain.exact_vectors is not None else None
        re, im = complex_linform(v, None, ex)
        u = _C(_form_dot_forcing(np.real(v), forcing), _form_dot_forcing(np.imag(v), forcing))
        acc = u * phi
        for rho in range(1, theta + 1):
            acc = acc + (mus[rho] * Cs[theta - rho]).scale(math.comb(theta, rho))
        Cs.append(acc.integral(t0))
        Fr, Fi = _cnode_times(re, im, phi)
        for r in range(theta):
            acc = _C(S.ZERO)
            for rho in range(1, theta - r + 1):
                Kprev = _C(S.ONE) if theta - rho == r else K[(theta - rho, r)]
                acc = acc + (mus[rho] * Kprev).scale(math.comb(theta, rho))
            K[(theta, r)] = acc.integral(t0)
            if K[(theta, r)].is_zero():
                continue
            pr, pi = _cnode_times(*Fs[r], K[(theta, r)])
            Fr, Fi = _cnode_sub(Fr, pr), _cnode_sub(Fi, pi)
        Fr = _cnode_minus_scalar(Fr, Cs[theta].re)
        if Fi is not None or not _is_zero(Cs[theta].im):
            Fi = _cnode_minus_scalar(Fi, Cs[theta].im)
        Fs.append((Fr, Fi))
        out.append((Fr, "ld-forced-chain"))
        if not d.is_real and Fi is not None:
            out.append((Fi, "ld-forced-chain"))
    return out


def ld_nonautonomous_integrals(spec: SystemSpec, mode: str | None = None,
                               tol: float = 1e-8) -> BasisResult:
    """Integrals of a Lappo-Danilevskii system from common eigenvectors and B_zeta chains.

    Returns up to n integrals; when the available structure gives fewer,
    the result carries a note saying so.
    """
    mode = _check_mode(spec, mode)
    mats, alphas, cs, chains = _ld_setup(spec, tol)
    forcing = spec.forcing if spec.has_forcing else None
    t0 = spec.anchor
    cands = []
    for d in chains:
        if not d.valid:
            continue
        if forcing is None:
            eig = _eigen_integrals(d.chain.vectors[0], _chain_exact0(d.chain), d.mu[0], alphas,
                                   None, t0, "ld-eigen")
            pairs = eig + _ld_chain_homogeneous(d, alphas, t0)
        else:
            pairs = _ld_chain_forced(d, alphas, forcing, t0)
        cands += [Candidate(F, tag) for F, tag in pairs]
    for e in _representatives(cs):
        pairs = _eigen_integrals(e.vector, _exact_of(e), e.lams, alphas, forcing, t0, "ld-eigen")
        cands += [Candidate(F, tag) for F, tag in pairs]
    sel = Selector(spec.n, t0)
    sel.fill(cands, spec.n)
    notes = _chain_notes(chains)
    if len(sel) == 0:
        raise ConstructionError("no common eigenvector or admissible chain gives an integral")
    if len(sel) < spec.n:
        notes.append(f"basis incomplete: {len(sel)} of {spec.n} integrals")
    return BasisResult([c.F for c in sel.chosen], [c.tag for c in sel.chosen], mode,
                       notes=notes, kind="lappo_danilevskii")


def _chain_exact0(c: EigenChain):
    return c.exact_vectors[0] if c.exact_vectors is not None else None


# ---------------------------------------------------------------------------
# autonomous integrals of Lappo-Danilevskii systems

@dataclass(frozen=True)
class _Clock:
    kind: str  # "log" (|u|^h), "log2" (u is a squared modulus: u^(h/2)) or "lin"
    node: IntegralExpr
    rates: tuple  # real rate along each A_j x


def _clocks(cs, chains):
    out = []
    for e in _representatives(cs):
        re, im = complex_linform(e.vector, None, _exact_of(e))
        lams = [complex(l) for l in e.lams]
        if im is None:
            out.append(_Clock("log", re, tuple(l.real for l in lams)))
        else:
            out.append(_Clock("log2", _modulus2(re, im), tuple(l.real for l in lams)))
            out.append(_Clock("lin", Arctan(im, re), tuple(l.imag for l in lams)))
    for d in chains:
        if not d.valid:
            continue
        for theta in range(1, d.s):
            out.append(_Clock("lin", d.psi(theta, "re"), tuple(d.mu[theta].real)))
            if not d.is_real:
                out.append(_Clock("lin", d.psi(theta, "im"), tuple(d.mu[theta].imag)))
    return out


def _rational(v, den=1000, tol=1e-10):
    q = Fraction(float(v)).limit_denominator(den)
    return q if abs(float(q) - float(v)) <= tol * (1 + abs(float(v))) else None


def exponent_solutions(R):
    """Basis of {h : sum_k R[k][j] h_k = 0 for every j}; integer vectors when R is rational.

    R is K x m (one row of rates per clock).  The basis comes from the
    reduced echelon form, so each vector has one free clock set to 1.
    """
    R = np.asarray(R, dtype=float)
    K, m = R.shape
    Q = [[_rational(v) for v in row] for row in R]
    if all(q is not None for row in Q for q in row):
        M = [[X.QI(Q[k][j]) for k in range(K)] for j in range(m)]
        out = []
        for v in X.nullspace(M, K):
            fr = [q.re for q in v]
            den = math.lcm(*[f.denominator for f in fr])
            ints = [int(f * den) for f in fr]
            g = math.gcd(*ints) or 1
            out.append([Fraction(i // g) for i in ints])
        return out
    _, sv, Vt = np.linalg.svd(R.T)
    rank = int(np.sum(sv > 1e-9 * max(sv.max(), 1.0))) if sv.size else 0
    null = Vt[rank:]
    if null.shape[0] == 0:
        return []
    # echelon form of the null basis for readable exponents
    N = null.copy()
    r = 0
    for c in range(K):
        if r == N.shape[0]:
            break
        p = r + int(np.argmax(np.abs(N[r:, c])))
        if abs(N[p, c]) < 1e-9:
            continue
        N[[r, p]] = N[[p, r]]
        N[r] /= N[r, c]
        for i in range(N.shape[0]):
            if i != r:
                N[i] -= N[i, c] * N[r]
        r += 1
    return [[float(v) if abs(v) > 1e-13 else 0.0 for v in row] for row in N]


def _from_exponents(clocks, h):
    logs, lins = [], []
    for c, w in zip(clocks, h):
        if w == 0:
            continue
        if c.kind == "log":
            logs.append((c.node, w))
        elif c.kind == "log2":
            logs.append((c.node, Fraction(w) / 2 if isinstance(w, Fraction) else w / 2))
        else:
            lins.append((float(w), c.node))
    if not logs and not lins:
        return None
    lin = _lincomb(lins) if lins else None
    if not logs:
        return lin
    P = product_of_powers(logs)
    return P if lin is None else P * Exp(lin)


def frozen_field_residual(F: IntegralExpr, mats, points) -> float:
    """max over points and j of |grad F . A_j x| / (|grad F| |A_j x|)."""
    worst = 0.0
    for x in points:
        g = gradient(F, 0.0, x)[1:]
        gn = np.linalg.norm(g)
        for A in mats:
            v = np.asarray(A, dtype=float) @ x
            den = gn * np.linalg.norm(v)
            if den == 0:
                continue
            worst = max(worst, abs(float(g @ v)) / den)
    return worst


def _frozen_points(F, n, count, seed):
    rng = np.random.default_rng(seed)
    pts = []
    tries = 0
    while len(pts) < count and tries < 50 * count:
        tries += 1
        x = rng.standard_normal(n)
        try:
            if all(abs(den.evaluate(0.0, x)) > 0.1 for den, _ in F.singular_denominators()):
                v = F.evaluate(0.0, x)
                if np.isfinite(v):
                    pts.append(x)
        except Exception:
            continue
    return pts


def ld_autonomous_integrals(spec: SystemSpec, tol: float = 1e-8) -> BasisResult:
    """Autonomous integrals of a homogeneous Lappo-Danilevskii system.

    Each common partial integral and chain Psi function is a clock with a
    constant rate along every A_j x.  Exponent vectors h in the null space
    of the rate system give F = prod |nu_k x|^{h_k} exp(sum h_l Psi_l); each
    F must also pass the frozen-field check along every A_j x.
    """
    if spec.has_forcing:
        raise ConstructionError("the system has forcing: only mode 'forced' applies")
    mats, alphas, cs, chains = _ld_setup(spec, tol)
    clocks = _clocks(cs, chains)
    notes = _chain_notes(chains)
    sols = exponent_solutions([c.rates for c in clocks]) if clocks else []
    sel = Selector(spec.n, spec.anchor)
    withheld = 0
    for h in sols:
        F = _from_exponents(clocks, h)
        if F is None:
            continue
        pts = _frozen_points(F, spec.n, FROZEN_POINTS, SEED)
        if len(pts) < FROZEN_POINTS or frozen_field_residual(F, mats, pts) > FROZEN_TOL:
            withheld += 1
            continue
        sel.offer(Candidate(F, "ld-autonomous"))
        if len(sel) == spec.n - 1:
            break
    if withheld:
        notes.append(f"{withheld} exponent solutions failed the frozen-field check")
    if len(sel) == 0:
        raise ConstructionError("the exponent system has only the trivial solution: "
                                "no autonomous integral from the available partial integrals")
    return BasisResult([c.F for c in sel.chosen], [c.tag for c in sel.chosen], "autonomous",
                       notes=notes, kind="lappo_danilevskii")


# ---------------------------------------------------------------------------
# dispatch

def basis(spec: SystemSpec, mode: str | None = None, kind: str | None = None,
          tol: float = 1e-8) -> BasisResult:
    """Integrals for a time-varying class (classified when ``kind`` is None)."""
    if kind is None:
        kind = classify_system(spec, tol).kind
    if kind == "lappo_danilevskii":
        if mode == "autonomous":
            return ld_autonomous_integrals(spec, tol)
        return ld_nonautonomous_integrals(spec, mode, tol)
    if kind == "triangular":
        return triangular_integrals(spec, mode)
    if kind == "algebraic_reducible":
        return algebraic_reducible_integrals(spec, mode, tol)
    raise ConstructionError(f"class {kind!r} is not a time-varying class")


__all__ = [
    "TAGS", "Classification", "classify_system", "normalized_terms", "entry_exprs",
    "alpha_gram_condition", "algebraic_reducible_integrals", "triangular_integrals",
    "LDChainData", "ld_chain_data", "psi_lie_derivatives", "ld_nonautonomous_integrals",
    "exponent_solutions", "frozen_field_residual", "ld_autonomous_integrals", "basis",
]
