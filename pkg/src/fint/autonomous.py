"""First integrals of constant-coefficient systems x' = A x (+ f(t)).

Every construction starts from Jordan chains of B = A^T (see
:mod:`fint.spectral`).  Along any solution, for a chain of eigenvalue lam,

* ``nu^0 x`` is a partial integral: d/dt (nu^0 x) = lam nu^0 x;
* ``q = nu^1 x / nu^0 x`` advances like the clock: dq/dt = 1;
* the higher Psi functions of the chain are constant.

The constructors combine these building blocks into constant functions.
They accept an optional :class:`Frame` so the reducible-system module can
reuse them with forms ``nu g(t) x`` and the clock ``s = t`` or ``s = ln t``.

Provenance tags are short neutral names; see :data:`TAGS`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import scalar as S
from .errors import ConstructionError
from .expr import (Add, Arctan, Div, Exp, IntegralExpr, LinForm, Mul, Pow, Psi, Quadrature,
                   ScalarLift, Sub, complex_linform, product_of_powers, scaled)
from .result import BasisResult, Candidate, MODES, Selector
from .spectral import EigenChain, SpectralData, spectrum_of_transpose

TAGS = {
    "kernel-form": "linear form of an eigenvector with eigenvalue 0",
    "same-eigenvalue-ratio": "ratio of two eigenvector forms sharing one eigenvalue",
    "eigen-product": "product of powers of two real eigenvector forms",
    "complex-modulus-phase": "modulus and phase of one complex eigenvector form",
    "complex-real-mixed": "real eigenvector form against the phase of a complex one",
    "phase-difference": "weighted difference of two complex phases",
    "chain-exponential": "eigenvector form against the chain clock nu^1 x / nu^0 x",
    "zero-chain-exponential": "eigenvector form against the clock of a zero-eigenvalue chain",
    "chain-clock-difference": "difference of two chain clocks",
    "chain-psi": "higher Psi functions of one chain",
    "eigen-time": "eigenvector form against the time factor",
    "chain-time": "chain clock minus time",
    "forced-eigen": "eigenvector form with the forcing quadrature removed",
    "forced-chain": "chain recursion with nested forcing quadratures",
}

ZERO_TOL = 1e-9


# ---------------------------------------------------------------------------
# frames

@dataclass(frozen=True)
class Frame:
    """Coordinates and clock used by the constructors.

    Attributes:
        g: optional n x n ScalarExpr transform; forms become nu . g(t) x.
        log: use the clock s = ln t (Euler-type reductions) instead of s = t.
        t0: quadrature anchor.
        forcing: forcing already expressed in the frame (g f when g is set).
        prefix: prepended to provenance tags.
    """

    g: tuple | None = None
    log: bool = False
    t0: float = 0.0
    forcing: tuple | None = None
    prefix: str = ""

    def clock(self) -> S.ScalarExpr:
        return S.call("ln", S.T) if self.log else S.T

    def weight(self) -> S.ScalarExpr:
        """ds/dt for the clock."""
        return S.div(1.0, S.T) if self.log else S.ONE

    def tag(self, name: str) -> str:
        return self.prefix + name


PLAIN = Frame()


def frame_for(spec) -> Frame:
    return Frame(None, False, spec.anchor, spec.forcing if spec.has_forcing else None)


# ---------------------------------------------------------------------------
# small helpers

def _lam_parts(c: EigenChain):
    """(Re lam, Im lam) as Fractions on the exact path, floats otherwise."""
    if c.exact_lam is not None:
        return c.exact_lam.re, c.exact_lam.im
    return float(c.lam.real), float(c.lam.imag)


def _zero(v) -> bool:
    return abs(float(v)) <= ZERO_TOL


def _same(a: complex, b: complex) -> bool:
    return abs(complex(a) - complex(b)) <= ZERO_TOL * (1.0 + abs(complex(a)))


def _forms(c: EigenChain, k: int, frame: Frame):
    ex = c.exact_vectors[k] if c.exact_vectors is not None else None
    return complex_linform(c.vectors[k], frame.g, ex)


def _real_form(c: EigenChain, k: int, frame: Frame) -> LinForm:
    re, im = _forms(c, k, frame)
    if im is not None:
        raise ConstructionError("a real eigenvector was required")
    return re


def _lift(e: S.ScalarExpr) -> IntegralExpr:
    if isinstance(e, S.Integral):
        return Quadrature.wrap(e)
    return ScalarLift(e)


def _times(node: IntegralExpr, s: S.ScalarExpr) -> IntegralExpr:
    """node * s(t) with trivial factors folded."""
    if s.is_constant():
        return scaled(s.constant_value(), node) if s.constant_value() != 0 else ScalarLift(S.ZERO)
    return Mul(node, ScalarLift(s))


def _lincomb(terms) -> IntegralExpr:
    """sum c_i * node_i, dropping zero coefficients; '-' for negative ones."""
    terms = [(float(c), u) for c, u in terms if float(c) != 0.0]
    if not terms:
        return ScalarLift(S.ZERO)
    out = scaled(terms[0][0], terms[0][1])
    for c, u in terms[1:]:
        out = Sub(out, scaled(-c, u)) if c < 0 else Add(out, scaled(c, u))
    return out


def _minus(node: IntegralExpr, s: S.ScalarExpr) -> IntegralExpr:
    """node - s(t), folding s = 0."""
    if s.is_constant() and s.constant_value() == 0.0:
        return node
    return Sub(node, _lift(s))


def _modulus2(re: IntegralExpr, im: IntegralExpr) -> IntegralExpr:
    return Add(Pow(_positive(re), 2), Pow(_positive(im), 2))


def _positive(u):
    """A form with its sign flipped when every coefficient is non-positive (for squares)."""
    if isinstance(u, LinForm) and u.g is None and np.all(u.coeffs <= 0):
        ex = None if u.exact is None else tuple(-v for v in u.exact)
        return LinForm(-u.coeffs, None, ex)
    return u


def _clock_quotient(c: EigenChain, frame: Frame):
    """Real and imaginary parts of nu^1 x / nu^0 x, plus |nu^0 x|^2 (None if real)."""
    r0, i0 = _forms(c, 0, frame)
    r1, i1 = _forms(c, 1, frame)
    if i0 is None and i1 is None:
        return Div(r1, r0), None, None
    zero = LinForm(np.zeros(c.vectors[0].shape[0]), frame.g)
    i0 = i0 if i0 is not None else zero
    i1 = i1 if i1 is not None else zero
    M = _modulus2(r0, i0)
    alpha = Add(Mul(r0, r1), Mul(i0, i1))
    beta = Sub(Mul(r0, i1), Mul(i0, r1))
    return Div(alpha, M), Div(beta, M), M


# ---------------------------------------------------------------------------
# partial integrals

@dataclass(frozen=True)
class PartialIntegral:
    """p = nu . x with d/dt p = lam p along solutions (``imag`` set when nu is complex)."""

    form: LinForm
    lam: complex
    imag: LinForm | None = None

    def text(self) -> str:
        if self.imag is None:
            return self.form.format()
        return f"{self.form.format()} + i*({self.imag.format()})"


def linear_partial_integral(chain: EigenChain, frame: Frame = PLAIN) -> PartialIntegral:
    re, im = _forms(chain, 0, frame)
    return PartialIntegral(re, complex(chain.lam), im)


# ---------------------------------------------------------------------------
# pairs of eigenvectors

def exponent_pair(c1: EigenChain, c2: EigenChain):
    """(h1, h2) with lam1 h1 + lam2 h2 = 0: (lam2, -lam1), in smallest integers when rational."""
    l1, _ = _lam_parts(c1)
    l2, _ = _lam_parts(c2)
    if isinstance(l1, Fraction) and isinstance(l2, Fraction):
        h1, h2 = l2, -l1
    else:
        l1, l2 = float(l1), float(l2)
        ratio = Fraction(l2 / l1).limit_denominator(24) if l1 != 0 else None
        if ratio is not None and abs(float(ratio) - l2 / l1) <= 1e-10 * (1 + abs(l2 / l1)):
            h1, h2 = ratio.numerator, -ratio.denominator
            if l1 < 0:
                h1, h2 = -h1, -h2
            h1, h2 = Fraction(h1), Fraction(h2)
        else:
            return l2, -l1
    den = math.lcm(h1.denominator, h2.denominator)
    a, b = int(h1 * den), int(h2 * den)
    g = math.gcd(a, b) or 1
    return Fraction(a // g), Fraction(b // g)


def _weighted_product(c1, c2, frame):
    if not (c1.is_real and c2.is_real):
        raise ConstructionError("both eigenvectors must be real")
    p1, p2 = _real_form(c1, 0, frame), _real_form(c2, 0, frame)
    l1, l2 = c1.lam.real, c2.lam.real
    if _zero(l1) and _zero(l2):
        if np.linalg.matrix_rank(np.array([c1.vectors[0].real, c2.vectors[0].real])) < 2:
            raise ConstructionError("both eigenvalues are zero and the eigenvectors are proportional")
        return p1, "kernel-form"
    if _zero(l1):
        return p1, "kernel-form"
    if _zero(l2):
        return p2, "kernel-form"
    if _same(l1, l2):
        return Div(p1, p2), "same-eigenvalue-ratio"
    h1, h2 = exponent_pair(c1, c2)
    return product_of_powers([(p1, h1), (p2, h2)]), "eigen-product"


def weighted_product_integral(c1: EigenChain, c2: EigenChain, frame: Frame = PLAIN) -> IntegralExpr:
    """Integral from two real eigenvectors.

    lam1 = 0 gives nu1 x; lam1 = lam2 gives nu1 x / nu2 x; otherwise
    |nu1 x|^h1 |nu2 x|^h2 with (h1, h2) from :func:`exponent_pair`.
    """
    return _weighted_product(c1, c2, frame)[0]


def _complex_forms(c1, c2, frame):
    if c2 is None:
        a, b = (float(v) for v in _lam_parts(c1))
        if _zero(b):
            raise ConstructionError("a complex eigenvalue was required")
        re, im = _forms(c1, 0, frame)
        M = _modulus2(re, im)
        if _zero(a):
            return [(M, "complex-modulus-phase")]
        return [(Mul(M, Exp(scaled(-2 * a / b, Arctan(im, re)))), "complex-modulus-phase")]
    if c1.is_real and not c2.is_real:
        c1, c2 = c2, c1
    a1, b1 = (float(v) for v in _lam_parts(c1))
    if _zero(b1):
        raise ConstructionError("at least one eigenvalue must be complex")
    re1, im1 = _forms(c1, 0, frame)
    if c2.is_real:
        l2 = float(c2.lam.real)
        p2 = _real_form(c2, 0, frame)
        if _zero(l2):
            return [(p2, "kernel-form")]
        return [(Mul(p2, Exp(scaled(-l2 / b1, Arctan(im1, re1)))), "complex-real-mixed")]
    if _same(c1.lam, np.conj(c2.lam)):
        raise ConstructionError("conjugate eigenvalues carry no new information")
    _, b2 = (float(v) for v in _lam_parts(c2))
    re2, im2 = _forms(c2, 0, frame)
    F = _lincomb([(b1, Arctan(im2, re2)), (-b2, Arctan(im1, re1))])
    return [(F, "phase-difference")]


def complex_autonomous_integrals(c1: EigenChain, c2: EigenChain | None = None,
                                 frame: Frame = PLAIN) -> list:
    """Integrals involving complex eigenvectors.

    One complex chain: modulus-phase form.  Complex plus real: the real
    form against the complex phase.  Two complex (not conjugate): weighted
    phase difference.
    """
    return [F for F, _ in _complex_forms(c1, c2, frame)]


# ---------------------------------------------------------------------------
# Jordan chains

def _chain_forms(primary, other, frame):
    if primary.m < 2:
        raise ConstructionError("a chain of length at least 2 is required")
    if other is None:
        a, b = (float(v) for v in _lam_parts(primary))
        if primary.is_real:
            p0 = _real_form(primary, 0, frame)
            if _zero(a):
                return [(p0, "kernel-form")]
            q = Div(_real_form(primary, 1, frame), p0)
            return [(Mul(p0, Exp(scaled(-a, q))), "chain-exponential")]
        re0, im0 = _forms(primary, 0, frame)
        qre, qim, M = _clock_quotient(primary, frame)
        # log|p|^2 - 2 Re(lam q) and arg p - Im(lam q)
        F1 = Mul(M, Exp(scaled(-2.0, _lincomb([(a, qre), (-b, qim)]))))
        F2 = Sub(Arctan(im0, re0), _lincomb([(b, qre), (a, qim)]))
        return [(F1, "chain-exponential"), (F2, "chain-exponential")]
    if other.m >= 2:
        q1 = _clock_quotient(primary, frame)[0]
        q2 = _clock_quotient(other, frame)[0]
        return [(Sub(q1, q2), "chain-clock-difference")]
    if not (primary.is_real and _zero(primary.lam.real)):
        raise ConstructionError("pairing a chain with an eigenvector needs a zero-eigenvalue chain")
    q = Div(_real_form(primary, 1, frame), _real_form(primary, 0, frame))
    a2, b2 = (float(v) for v in _lam_parts(other))
    if other.is_real:
        p2 = _real_form(other, 0, frame)
        if _zero(a2):
            return [(p2, "kernel-form")]
        return [(Mul(p2, Exp(scaled(-a2, q))), "zero-chain-exponential")]
    re2, im2 = _forms(other, 0, frame)
    M2 = _modulus2(re2, im2)
    F1 = M2 if _zero(a2) else Mul(M2, Exp(scaled(-2 * a2, q)))
    F2 = Sub(Arctan(im2, re2), scaled(b2, q))
    return [(F1, "zero-chain-exponential"), (F2, "zero-chain-exponential")]


def chain_autonomous_integrals(primary: EigenChain, other: EigenChain | None = None,
                               frame: Frame = PLAIN) -> list:
    """Integrals built on the chain clock nu^1 x / nu^0 x.

    Alone: nu^0 x * exp(-lam q) (two real integrals for a complex chain).
    With an eigenvector of another eigenvalue (primary eigenvalue 0):
    nu x * exp(-lam_2 q).  With a second chain: q1 - q2.
    """
    return [F for F, _ in _chain_forms(primary, other, frame)]


def psi_evaluators(chain: EigenChain, frame: Frame = PLAIN) -> list:
    """Psi_2 .. Psi_{m-1} of a chain (Re and Im parts for complex chains)."""
    if chain.m < 3:
        raise ConstructionError("Psi integrals need a chain of length at least 3")
    out = []
    for k in range(2, chain.m):
        out.append(Psi(chain.vectors, k, "re", frame.g))
        if not chain.is_real:
            out.append(Psi(chain.vectors, k, "im", frame.g))
    return out


# ---------------------------------------------------------------------------
# integrals involving time

def _time_forms(chain, frame):
    s = frame.clock()
    a, b = (float(v) for v in _lam_parts(chain))
    if chain.m >= 2:
        qre, qim, _ = _clock_quotient(chain, frame)
        out = [(_minus(qre, s), "chain-time")]
        if qim is not None:
            out.append((qim, "chain-time"))
        return out
    re, im = _forms(chain, 0, frame)
    if im is None:
        return [(_times(re, S.call("exp", S.mul(-a, s))), "eigen-time")]
    M = _modulus2(re, im)
    return [(_times(M, S.call("exp", S.mul(-2 * a, s))), "eigen-time"),
            (_minus(Arctan(im, re), S.mul(b, s)), "eigen-time")]


def time_anchored_integral(chain: EigenChain, frame: Frame = PLAIN) -> list:
    """Integrals carrying explicit time.

    Simple real lam: nu x e^{-lam t}.  Complex: |nu x|^2 e^{-2 Re(lam) t}
    and arg(nu x) - Im(lam) t.  Chain: nu^1 x / nu^0 x - t (its real and
    imaginary parts for a complex chain).
    """
    return [F for F, _ in _time_forms(chain, frame)]


def _rotation(chain, frame):
    """Scalars cos(b s), sin(b s) and exp(-a s) for lam = a + b i."""
    s = frame.clock()
    a, b = (float(v) for v in _lam_parts(chain))
    E = S.call("exp", S.mul(-a, s))
    if _zero(b):
        return None, None, E
    return S.call("cos", S.mul(b, s)), S.call("sin", S.mul(b, s)), E


def _form_dot_forcing(nu, forcing) -> S.ScalarExpr:
    acc = S.ZERO
    for c, f in zip(nu, forcing):
        if c > 0:
            acc = S.add(acc, S.mul(float(c), f))
        elif c < 0:
            acc = S.sub(acc, S.mul(float(-c), f))
    return acc


def _alphas(chain, k, frame):
    """Real parts of nu^k x e^{-lam s} (one or two of them) and the matching
    quadrature integrands nu^k f(tau) e^{-lam s(tau)}."""
    re, im = _forms(chain, k, frame)
    C, Sn, E = _rotation(chain, frame)
    forcing = frame.forcing
    v = chain.vectors[k]
    ure = _form_dot_forcing(v.real, forcing) if forcing is not None else S.ZERO
    uim = _form_dot_forcing(v.imag, forcing) if forcing is not None else S.ZERO
    if C is None:
        return [(_times(re, E), S.mul(ure, E))]
    if im is None:
        im = LinForm(np.zeros(v.shape[0]), frame.g)
    a1 = _times(Add(_times(re, C), _times(im, Sn)), E)
    a2 = _times(Sub(_times(im, C), _times(re, Sn)), E)
    i1 = S.mul(S.add(S.mul(ure, C), S.mul(uim, Sn)), E)
    i2 = S.mul(S.sub(S.mul(uim, C), S.mul(ure, Sn)), E)
    return [(a1, i1), (a2, i2)]


def _forced_eigen(chain, frame):
    out = []
    for alpha, integrand in _alphas(chain, 0, frame):
        out.append((_minus(alpha, S.integral(integrand, frame.t0)), "forced-eigen"))
    return out


def forced_integral(chain: EigenChain, forcing=None, frame: Frame = PLAIN) -> list:
    """nu x e^{-lam t} - int_{t0}^t nu f e^{-lam tau} dtau (Re/Im pair when complex).

    ``forcing`` overrides the frame's forcing when given.
    """
    if forcing is not None:
        frame = Frame(frame.g, frame.log, frame.t0, tuple(S.as_scalar(f) for f in forcing),
                      frame.prefix)
    return [F for F, _ in _forced_eigen(chain, frame)]


def _forced_chain(chain, frame):
    if chain.m < 2:
        raise ConstructionError("the forced chain recursion needs a chain of length at least 2")
    s = frame.clock()
    w = frame.weight()
    per_theta = None
    for k in range(chain.m):
        pairs = _alphas(chain, k, frame)
        if per_theta is None:
            per_theta = [{"F": [], "C": []} for _ in pairs]
        for th, (alpha, integrand) in enumerate(pairs):
            st = per_theta[th]
            if k > 0:
                integrand = S.add(integrand, S.mul(float(k), S.mul(w, st["C"][k - 1])))
            Ck = S.integral(integrand, frame.t0)
            st["C"].append(Ck)
            terms = []
            for tau in range(k):
                coef = math.comb(k, tau)
                terms.append((coef, _times(st["F"][tau], S.power(s, float(k - tau)))))
            F = alpha if not terms else Sub(alpha, _lincomb(terms))
            st["F"].append(_minus(F, Ck))
    out = []
    for st in per_theta:
        out.extend((F, "forced-chain") for F in st["F"])
    return out


def forced_chain_integrals(chain: EigenChain, forcing=None, frame: Frame = PLAIN) -> list:
    """The m integrals of a chain with nested quadratures C_k (2m for a complex chain).

    F_1 = nu^0 x e^{-lam t} - C_0 and, for k >= 1,
    F_{k+1} = nu^k x e^{-lam t} - sum_tau C(k, tau) t^{k-tau} F_{tau+1} - C_k,
    C_k(t) = int_{t0}^t (nu^k f e^{-lam tau} + k C_{k-1}) dtau.
    """
    if forcing is not None:
        frame = Frame(frame.g, frame.log, frame.t0, tuple(S.as_scalar(f) for f in forcing),
                      frame.prefix)
    return [F for F, _ in _forced_chain(chain, frame)]


# ---------------------------------------------------------------------------
# basis selection

def _representatives(data: SpectralData):
    """Chains with Im lam >= 0 (a conjugate chain adds nothing new)."""
    return [c for c in data.chains if c.lam.imag >= 0]


def _tagged(pairs, frame):
    return [Candidate(F, frame.tag(tag)) for F, tag in pairs]


def _safe(fn, *args):
    try:
        return fn(*args)
    except ConstructionError:
        return []


def autonomous_candidates(data: SpectralData, frame: Frame = PLAIN):
    """Candidates in the documented order: kernel forms, same-eigenvalue
    ratios, Psi and other chain forms, cross-eigenvalue products, complex forms."""
    reps = _representatives(data)
    real = [c for c in reps if c.is_real]
    cplx = [c for c in reps if not c.is_real]
    out = []
    for c in real:
        if _zero(c.lam.real):
            out += _tagged([(_real_form(c, 0, frame), "kernel-form")], frame)
    for i, c1 in enumerate(real):
        for c2 in real[i + 1:]:
            if not _zero(c1.lam.real) and _same(c1.lam, c2.lam):
                out += _tagged([_weighted_product(c1, c2, frame)], frame)
    for c in reps:
        if c.m >= 3:
            out += [Candidate(F, frame.tag("chain-psi")) for F in psi_evaluators(c, frame)]
    for c in reps:
        if c.m >= 2:
            out += _tagged(_chain_forms(c, None, frame), frame)
    for c1 in reps:
        if c1.m >= 2 and c1.is_real and _zero(c1.lam.real):
            for c2 in reps:
                if c2 is not c1:
                    out += _tagged(_safe(_chain_forms, c1, _as_eigen(c2), frame), frame)
    for i, c1 in enumerate(reps):
        for c2 in reps[i + 1:]:
            if c1.m >= 2 and c2.m >= 2:
                out += _tagged(_safe(_chain_forms, c1, c2, frame), frame)
    for i, c1 in enumerate(real):
        for c2 in real[i + 1:]:
            if not _same(c1.lam, c2.lam):
                out += _tagged([_weighted_product(c1, c2, frame)], frame)
    for c in cplx:
        out += _tagged(_complex_forms(c, None, frame), frame)
    for c1 in cplx:
        for c2 in real:
            out += _tagged(_complex_forms(c1, c2, frame), frame)
    for i, c1 in enumerate(cplx):
        for c2 in cplx[i + 1:]:
            out += _tagged(_safe(_complex_forms, c1, c2, frame), frame)
    return out


def _as_eigen(c: EigenChain) -> EigenChain:
    """The eigenvector of a chain, as a chain of length 1."""
    ev = c.exact_vectors[:1] if c.exact_vectors is not None else None
    return EigenChain(c.lam, c.vectors[:1], c.exact_lam, ev)


def time_candidates(data: SpectralData, frame: Frame = PLAIN):
    out = []
    for c in _representatives(data):
        out += _tagged(_time_forms(c, frame), frame)
    return out


def forced_candidates(data: SpectralData, frame: Frame = PLAIN):
    out = []
    for c in _representatives(data):
        pairs = _forced_chain(c, frame) if c.m >= 2 else _forced_eigen(c, frame)
        out += _tagged(pairs, frame)
    return out


def basis_from_spectrum(data: SpectralData, n: int, mode: str, frame: Frame = PLAIN,
                        kind: str = "constant") -> BasisResult:
    """Select an independent basis of integrals for the given mode."""
    if mode not in MODES:
        raise ConstructionError(f"unknown mode {mode!r}")
    sel = Selector(n, frame.t0)
    if mode == "forced":
        cands = forced_candidates(data, frame)
        sel.fill(cands, n)
        return sel.result(mode, n, kind)
    sel.fill(autonomous_candidates(data, frame), n - 1)
    if mode == "autonomous":
        notes = ["one-dimensional system: no autonomous integrals"] if n == 1 else []
        return sel.result(mode, n - 1, kind, notes)
    if len(sel) < n - 1:
        sel.result(mode, n - 1, kind)  # raises with the selected subset
    sel.fill(time_candidates(data, frame), n)
    return sel.result(mode, n, kind)


def basis(spec, mode: str | None = None, tol: float = 1e-8) -> BasisResult:
    """Basis of first integrals of a constant-coefficient system.

    ``mode`` defaults to "forced" when the system has forcing and to
    "autonomous" otherwise.  autonomous: n-1 integrals of the homogeneous
    system; full: those plus one integral carrying time; forced: n
    integrals with forcing quadratures.
    """
    if not spec.is_constant_coefficient():
        raise ConstructionError("the coefficients depend on t")
    if mode is None:
        mode = "forced" if spec.has_forcing else "autonomous"
    if spec.has_forcing and mode != "forced":
        raise ConstructionError("the system has forcing: only mode 'forced' applies")
    A = spec.constant_matrix_exact()
    data = spectrum_of_transpose(A if A is not None else spec.constant_matrix(), tol)
    return basis_from_spectrum(data, spec.n, mode, frame_for(spec))


__all__ = [
    "TAGS", "Frame", "PLAIN", "frame_for", "PartialIntegral", "linear_partial_integral",
    "exponent_pair", "weighted_product_integral", "complex_autonomous_integrals",
    "chain_autonomous_integrals", "psi_evaluators", "time_anchored_integral", "forced_integral",
    "forced_chain_integrals", "autonomous_candidates", "time_candidates", "forced_candidates",
    "basis_from_spectrum", "basis",
]
