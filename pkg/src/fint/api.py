"""High-level entry points shared by the CLI and library users."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import autonomous, reducible, timevarying
from .errors import ConstructionError, SpecError, SpectralError
from .expr import Add, LinForm, perturb_first_coefficient
from .numerics import verify_integrals
from .result import BasisResult
from .spectral import common_spectrum, format_number, spectrum_of_transpose
from .system import SystemSpec

INJECT_DELTA = 1e-3


def load_spec(path) -> SystemSpec:
    """Read a JSON spec file; SpecError on unreadable or malformed input."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise SpecError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}") from None
    return SystemSpec.from_json(doc)


def classify(spec: SystemSpec, tol: float = 1e-8):
    return timevarying.classify_system(spec, tol)


@dataclass
class Analysis:
    classification: object
    sections: list = field(default_factory=list)  # (title, [lines])

    def lines(self):
        out = list(self.classification.lines())
        for title, body in self.sections:
            out.append(f"{title}:")
            out += [f"  {s}" for s in body]
        return out

    def to_json(self):
        c = self.classification
        return {"class": c.kind,
                "evidence": {k: str(v) for k, v in c.evidence.items()},
                "notes": list(c.notes),
                "sections": [{"title": t, "lines": list(b)} for t, b in self.sections]}


def _vec(v) -> str:
    return "(" + ", ".join(format_number(z) for z in np.asarray(v, dtype=complex)) + ")"


def _chain_lines(data, var="λ"):
    out = []
    for c in data.chains:
        vecs = "; ".join(_vec(v) for v in c.vectors)
        out.append(f"{var}={format_number(c.lam)} divisor {c.divisor_text(var)}: {vecs}")
    return out


def _structure(data, var="λ"):
    """One line per distinct eigenvalue: multiplicity and divisor sizes."""
    out = []
    for lam, k in data.eigenvalues():
        sizes = [c.m for c in data.chains if c.lam == lam]
        if all(m == 1 for m in sizes):
            d = f"{len(sizes)} simple divisor" + ("s" if len(sizes) > 1 else "")
        else:
            d = "divisors " + ", ".join(c.divisor_text(var) for c in data.chains if c.lam == lam)
        out.append(f"{var}={format_number(lam)} ×{k}, {d}")
    return out


def _superscript(j: int) -> str:
    return str(j).translate(str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹"))


def analyze(spec: SystemSpec, tol: float = 1e-8) -> Analysis:
    """Classification plus the spectral data each class is built from."""
    cls = classify(spec, tol)
    a = Analysis(cls)
    kind = cls.kind
    if kind == "constant":
        A = spec.constant_matrix_exact()
        data = spectrum_of_transpose(A if A is not None else spec.constant_matrix(), tol)
        a.sections.append(("spectrum of A^T", [data.summary()] + _structure(data)
                           + _chain_lines(data)))
    elif kind == "reducible":
        data = spectrum_of_transpose(np.asarray(spec.reduction.B, float).tolist(), tol)
        a.sections.append(("spectrum of the reduced matrix B^T",
                           [data.summary()] + _chain_lines(data)))
    elif kind == "triangular":
        terms = timevarying.normalized_terms(spec)
        diag = []
        for i in range(spec.n):
            parts = [f"{format_number(A[i, i])}*α{j + 1}" for j, (_, A) in enumerate(terms)
                     if A[i, i] != 0]
            diag.append(f"a{i + 1}{i + 1} = " + (" + ".join(parts) or "0"))
        a.sections.append(("diagonal coefficients", diag))
    else:
        terms = timevarying.normalized_terms(spec)
        if kind == "lappo_danilevskii":
            for j, (_, A) in enumerate(terms, 1):
                var = "λ" + _superscript(j)
                data = spectrum_of_transpose(A.tolist(), tol)
                a.sections.append((f"B{j}", [data.summary(var)] + _structure(data, var)
                                          + _chain_lines(data, var)))
        try:
            cs = common_spectrum([A.T for _, A in terms], tol, require_commuting=False)
            lines = []
            for e in cs.eigen:
                lams = ", ".join(format_number(l) for l in e.lams)
                lines.append(f"{_vec(e.vector)} with eigenvalues ({lams})")
            a.sections.append(("common eigenvectors", lines))
        except SpectralError as e:
            a.sections.append(("common eigenvectors", [f"none: {e}"]))
    return a


def construct_basis(spec: SystemSpec, mode: str | None = None, tol: float = 1e-8,
                    classification=None) -> BasisResult:
    """Classify (unless given) and run the matching constructor."""
    cls = classification if classification is not None else classify(spec, tol)
    kind = cls.kind
    if kind == "constant":
        if spec.n == 1 and (mode in (None, "autonomous")) and not spec.has_forcing:
            return BasisResult([], [], "autonomous", kind="constant",
                               notes=["n = 1: no autonomous integral exists"])
        res = autonomous.basis(spec, mode, tol)
    elif kind == "reducible":
        res = reducible.reducible_integrals(spec, mode, tol)
    else:
        res = timevarying.basis(spec, mode, kind, tol)
    res.notes = list(cls.notes) + list(res.notes)
    return res


def inject_perturbation(res: BasisResult, index: int = 0, delta: float = INJECT_DELTA) -> BasisResult:
    """Copy of ``res`` with integral ``index`` corrupted (harness self-test)."""
    if not res.integrals:
        raise ConstructionError("nothing to corrupt: the basis is empty")
    F = res.integrals[index]
    try:
        G = perturb_first_coefficient(F, delta)
    except ValueError:
        n = _dimension(F)
        e = np.zeros(n)
        e[0] = delta
        G = Add(F, LinForm(e))
    Fs = list(res.integrals)
    Fs[index] = G
    tags = list(res.provenance)
    tags[index] = tags[index] + "+injected"
    return BasisResult(Fs, tags, res.mode, notes=list(res.notes) + [f"integral {index} was corrupted"],
                       kind=res.kind)


def _dimension(F) -> int:
    stack = [F]
    while stack:
        node = stack.pop()
        if isinstance(node, LinForm):
            return node.n
        n = getattr(node, "n", None)
        if isinstance(n, int):
            return n
        stack.extend(node.children())
    raise ConstructionError("cannot infer the dimension of the integral")


def verify(spec: SystemSpec, res: BasisResult, trajectories: int = 20, tol: float = 1e-7,
           seed: int = 0, **kw):
    return verify_integrals(spec, res.integrals, res.provenance, trajectories=trajectories,
                            tol=tol, seed=seed, **kw)


__all__ = ["Analysis", "load_spec", "classify", "analyze", "construct_basis",
           "inject_perturbation", "verify", "INJECT_DELTA"]
