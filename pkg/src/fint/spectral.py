"""Eigenvalues, Jordan chains and common eigenvectors of transposed matrices.

Chains follow the scaled convention used by the integral constructions:
``(B - lam E) nu^k = k nu^{k-1}`` for ``k = 1..m-1`` and ``(B - lam E) nu^0 = 0``.

Two paths:

* exact, when the matrix is rational and every eigenvalue is a Gaussian
  rational (found by exact divisor search on the characteristic polynomial);
* float, using ``numpy.linalg.eig`` for eigenvalues and SVD rank decisions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact as X
from .errors import SpectralError

DEFAULT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class EigenChain:
    """One Jordan chain of B = A^T in the scaled convention."""

    lam: complex
    vectors: tuple  # of complex numpy arrays nu^0 .. nu^{m-1}
    exact_lam: X.QI | None = None
    exact_vectors: tuple | None = None  # tuples of QI, parallel to vectors

    @property
    def m(self) -> int:
        return len(self.vectors)

    @property
    def is_real(self) -> bool:
        return self.lam.imag == 0.0

    @property
    def exact(self) -> bool:
        return self.exact_vectors is not None

    def real_vectors(self):
        return [np.real(v).astype(float) for v in self.vectors]

    def residuals(self, B) -> list[float]:
        """Norms of (B - lam E) nu^k - k nu^{k-1}; computed exactly when possible."""
        if self.exact and B is not None and X.is_rational_matrix(np.real(B).tolist()) \
                and not np.iscomplexobj(B):
            Bq = X.qmat(np.asarray(B).tolist())
            N = X.shift(Bq, self.exact_lam)
            out = []
            for k, v in enumerate(self.exact_vectors):
                r = X.matvec(N, list(v))
                if k:
                    r = [a - k * b for a, b in zip(r, self.exact_vectors[k - 1])]
                out.append(math.sqrt(float(sum(x.norm2() for x in r))))
            return out
        B = np.asarray(B, dtype=complex)
        N = B - self.lam * np.eye(B.shape[0])
        out = []
        for k, v in enumerate(self.vectors):
            r = N @ v
            if k:
                r = r - k * self.vectors[k - 1]
            out.append(float(np.linalg.norm(r)))
        return out

    def conjugate(self) -> "EigenChain":
        ev = None
        if self.exact_vectors is not None:
            ev = tuple(tuple(x.conj() for x in v) for v in self.exact_vectors)
        return EigenChain(
            complex(self.lam).conjugate(),
            tuple(np.conj(v) for v in self.vectors),
            self.exact_lam.conj() if self.exact_lam is not None else None,
            ev,
        )

    def divisor_text(self, var="λ") -> str:
        return divisor_text(self.lam, self.m, var, self.exact_lam)


@dataclass(frozen=True, eq=False)
class SpectralData:
    chains: tuple
    char_poly_coeffs: tuple  # det(lam E - B), constant term first
    exact: bool

    def eigenvalues(self):
        """Distinct eigenvalues with algebraic multiplicities, in chain order."""
        out: list[list] = []
        for c in self.chains:
            for item in out:
                if item[0] == c.lam:
                    item[1] += c.m
                    break
            else:
                out.append([c.lam, c.m])
        return [(lam, k) for lam, k in out]

    def divisors(self):
        return [(c.lam, c.m) for c in self.chains]

    def summary(self, var="λ") -> str:
        """e.g. ``eigenvalues: 0, 1 (×2), 2; divisors: λ, λ−1, λ−1, λ−2``."""
        ev = []
        for lam, k in self.eigenvalues():
            s = format_number(lam)
            ev.append(s if k == 1 else f"{s} (×{k})")
        dv = [c.divisor_text(var) for c in self.chains]
        return f"eigenvalues: {', '.join(ev)}; divisors: {', '.join(dv)}"


def format_number(z, exact=None) -> str:
    z = complex(z)
    def real(v):
        if abs(v - round(v)) < 1e-12:
            return str(int(round(v)))
        fr = Fraction(v).limit_denominator(1000)
        if abs(float(fr) - v) < 1e-12:
            return f"{fr.numerator}/{fr.denominator}"
        return f"{v:.10g}"
    if z.imag == 0:
        return real(z.real)
    im = real(abs(z.imag))
    im = "" if im == "1" else im
    if z.real == 0:
        return f"{'-' if z.imag < 0 else ''}{im}i"
    return f"{real(z.real)}{'+' if z.imag > 0 else '-'}{im}i"


_SUP = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def divisor_text(lam, m, var="λ", exact_lam=None) -> str:
    lam = complex(lam)
    if lam == 0:
        base = var
    else:
        s = format_number(-lam if lam.imag == 0 else lam)
        if lam.imag == 0:
            base = f"{var}+{s}" if lam.real < 0 else f"{var}−{format_number(lam)}"
        else:
            base = f"{var}−({format_number(lam)})"
    if m == 1:
        return base
    return f"({base}){str(m).translate(_SUP)}"


# ---------------------------------------------------------------------------
# generic top-down chain selection

def _select_chains(n, alg_mult, nullspace, matpow_apply, independent, max_len=None):
    """Return chains as lists [w_0, ..., w_{L-1}] with N w_j = w_{j-1}, N w_0 = 0.

    nullspace(k) -> basis of ker N^k; matpow_apply(v, k) -> N^k v;
    independent(U, v) -> bool.
    """
    kers = [[]]
    k = 0
    while True:
        k += 1
        ker = nullspace(k)
        kers.append(ker)
        if len(ker) >= alg_mult or len(ker) == len(kers[-2]) or k > n:
            break
    if len(kers[-1]) != alg_mult:
        raise SpectralError(
            f"generalized eigenspace has dimension {len(kers[-1])}, expected {alg_mult}")
    K = len(kers) - 1
    count_ge = [0] * (K + 2)
    for j in range(1, K + 1):
        count_ge[j] = len(kers[j]) - len(kers[j - 1])
    chains = []  # (top vector, length)
    for lev in range(K, 0, -1):
        need = count_ge[lev] - count_ge[lev + 1]
        if need < 0:
            raise SpectralError("inconsistent Jordan structure")
        U = list(kers[lev - 1])
        for top, L in chains:
            U.append(matpow_apply(top, L - lev))
        for v in kers[lev]:
            if need == 0:
                break
            if independent(U, v):
                U.append(v)
                chains.append((v, lev))
                need -= 1
        if need:
            raise SpectralError("could not complete Jordan chains")
    out = []
    for top, L in chains:
        ws = [None] * L
        ws[L - 1] = top
        for j in range(L - 1, 0, -1):
            ws[j - 1] = matpow_apply(ws[j], 1)
        out.append(ws)
    return out


def _scale_convention(ws, mul):
    """Standard chain -> scaled chain nu^k = k! w_k."""
    return [mul(w, math.factorial(k)) for k, w in enumerate(ws)]


# ---------------------------------------------------------------------------
# exact path

def _exact_chains(Bq, lam: X.QI, alg_mult: int):
    n = len(Bq)
    N = X.shift(Bq, lam)
    powers = {0: X.eye(n)}

    def npow(k):
        if k not in powers:
            powers[k] = X.matmul(N, npow(k - 1))
        return powers[k]

    def apply(v, k):
        for _ in range(k):
            v = X.matvec(N, v)
        return v

    raw = _select_chains(n, alg_mult, lambda k: X.nullspace(npow(k)), apply, X.independent_of)
    chains = []
    for ws in raw:
        nus = _scale_convention(ws, lambda w, f: [x * f for x in w])
        nus = _reduce_generalized_exact(nus)
        s = X.primitive_scale(nus[0])
        nus = [[x * s for x in v] for v in nus]
        chains.append(nus)
    return chains


def _reduce_generalized_exact(nus):
    """Make every nu^k (k >= 1) vanish at the leading index of nu^0.

    Uses nu'^k = sum_j C(k, j) a_j nu^{k-j} (a_0 = 1), which preserves the
    scaled chain relations.
    """
    p = next(i for i, x in enumerate(nus[0]) if x)
    a = [X.QI(1)]
    out = [nus[0]]
    for k in range(1, len(nus)):
        s = X.QI()
        for j in range(k):
            s = s + math.comb(k, j) * a[j] * nus[k - j][p]
        a.append(-s / nus[0][p])
        v = [X.QI() for _ in nus[0]]
        for j in range(k + 1):
            c = math.comb(k, j) * a[j]
            v = [x + c * y for x, y in zip(v, nus[k - j])]
        out.append(v)
    return out


def _exact_spectrum(A):
    n = len(A)
    Bq = X.transpose(X.qmat(A))
    eig = X.exact_eigenvalues([[A[j][i] for j in range(n)] for i in range(n)])
    if eig is None:
        return None
    chains = []
    for lam, mult in eig:
        if lam.im < 0:
            continue
        for nus in _exact_chains(Bq, lam, mult):
            ch = EigenChain(
                complex(lam),
                tuple(X.as_complex_vector(v) for v in nus),
                lam,
                tuple(tuple(v) for v in nus),
            )
            chains.append(ch)
            if lam.im > 0:
                chains.append(ch.conjugate())
    cp = X.charpoly([[A[j][i] for j in range(n)] for i in range(n)])
    return _sorted(chains), tuple(complex(float(c)) for c in cp)


def _sorted(chains):
    return sorted(chains, key=lambda c: (c.lam.real, c.lam.imag, c.m))


# ---------------------------------------------------------------------------
# float path

def _svd_null(M, thr):
    if M.shape[0] == 0:
        return list(np.eye(M.shape[1], dtype=M.dtype))
    u, s, vh = np.linalg.svd(M)
    smax = s[0] if s.size else 0.0
    r = int(np.sum(s > thr * max(smax, 1.0)))
    return [np.conj(vh[i]) for i in range(r, M.shape[1])]


def _float_independent(thr):
    def independent(U, v):
        if not U:
            return np.linalg.norm(v) > thr
        M = np.array(U + [v]).T
        s = np.linalg.svd(M, compute_uv=False)
        s0 = np.linalg.svd(np.array(U).T, compute_uv=False)
        r1 = int(np.sum(s > thr * max(s[0], 1e-300)))
        r0 = int(np.sum(s0 > thr * max(s0[0], 1e-300)))
        return r1 > r0
    return independent


def _cluster(vals, dist):
    """Greedy clustering of eigenvalues sorted by (re, im)."""
    order = sorted(range(len(vals)), key=lambda i: (round(vals[i].real, 12), vals[i].imag))
    clusters: list[list[complex]] = []
    for i in order:
        v = vals[i]
        for c in clusters:
            if abs(np.mean(c) - v) <= dist:
                c.append(v)
                break
        else:
            clusters.append([v])
    return clusters


def _float_chains(B, lam, alg_mult, tol):
    n = B.shape[0]
    real = lam.imag == 0.0
    dtype = float if real else complex
    N = B - lam.real * np.eye(n) if real else (B - lam * np.eye(n)).astype(dtype)
    thr = tol

    def npow(k):
        return np.linalg.matrix_power(N, k)

    def apply(v, k):
        for _ in range(k):
            v = N @ v
        return v

    raw = _select_chains(n, alg_mult, lambda k: _svd_null(npow(k), thr), apply,
                         _float_independent(1e-6))
    chains = []
    for ws in raw:
        nus = _scale_convention(ws, lambda w, f: w * f)
        nus = _reduce_generalized_float(nus)
        nus = [np.asarray(v, dtype=complex) for v in nus]
        chains.append(nus)
    return chains


def _leading_index(v, rel=1e-8):
    a = np.abs(v)
    return int(np.argmax(a > rel * a.max()))


def _reduce_generalized_float(nus):
    p = _leading_index(nus[0])
    a = [1.0]
    out = [nus[0]]
    for k in range(1, len(nus)):
        s = sum(math.comb(k, j) * a[j] * nus[k - j][p] for j in range(k))
        a.append(-s / nus[0][p])
        out.append(sum(math.comb(k, j) * a[j] * nus[k - j] for j in range(k + 1)))
    scale = 1.0 / out[0][p]
    res = []
    for v in out:
        w = v * scale
        w = np.where(np.abs(w) < 1e-14 * max(1.0, np.abs(w).max()), 0.0, w)
        res.append(w)
    return res


def _float_spectrum(A, tol):
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    B = A.T.copy()
    norm = max(np.linalg.norm(A, 2), 1.0)
    vals = np.linalg.eigvals(B)
    # snap conjugate pairs and near-real values
    vals = np.array([complex(v.real, 0.0) if abs(v.imag) <= tol * norm else v for v in vals])
    clusters = _cluster(list(vals), tol * norm)
    loose = _cluster([complex(np.mean(c)) for c in clusters], 1e-4 * norm)
    if len(loose) != len(clusters):
        # try to merge near clusters; accept only if ranks confirm one defective block
        merged = _cluster(list(vals), 1e-4 * norm)
        for c in merged:
            lam = complex(np.mean(c))
            Nk = np.linalg.matrix_power(B - lam * np.eye(n), len(c))
            s = np.linalg.svd(Nk, compute_uv=False)
            nul = int(np.sum(s <= 1e-6 * max(s[0], 1.0)))
            if nul != len(c):
                raise SpectralError(
                    f"eigenvalue cluster near {format_number(lam)} is ambiguous "
                    f"(size {len(c)}, null dimension {nul})")
        clusters = merged
    chains = []
    for c in clusters:
        lam = complex(np.mean(c))
        if abs(lam.imag) <= tol * norm:
            lam = complex(lam.real, 0.0)
        if lam.imag < 0:
            continue
        for nus in _float_chains(B, lam, len(c), tol if len(c) == 1 else 1e-6):
            if lam.imag == 0.0:
                nus = [np.real(v).astype(complex) for v in nus]
            ch = EigenChain(lam, tuple(nus))
            chains.append(ch)
            if lam.imag > 0:
                chains.append(ch.conjugate())
    cp = np.poly(B)[::-1]
    return _sorted(chains), tuple(complex(v) for v in cp)


def spectrum_of_transpose(A, tol: float = DEFAULT_TOL, exact: bool | None = None) -> SpectralData:
    """Full Jordan-chain decomposition of B = A^T.

    Args:
        A: square real matrix (nested lists or array).
        tol: clustering tolerance relative to ||A||_2 on the float path.
        exact: force (True) or forbid (False) the exact path; default tries
            exact first when the entries are rational.
    """
    A_list = np.asarray(A, dtype=float).tolist() if not isinstance(A, list) else A
    arr = np.asarray(A_list, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise SpectralError("matrix must be square")
    n = arr.shape[0]
    if n == 0:
        return SpectralData((), (1.0,), True)
    if exact is not False and X.is_rational_matrix(A_list):
        res = _exact_spectrum([[X.to_fraction(v) for v in row] for row in A_list])
        if res is not None:
            chains, cp = res
            return SpectralData(tuple(chains), cp, True)
        if exact:
            raise SpectralError("eigenvalues are not all Gaussian rationals")
    chains, cp = _float_spectrum(arr, tol)
    if sum(c.m for c in chains) != n:
        raise SpectralError("chain lengths do not add up to the dimension")
    return SpectralData(tuple(chains), cp, False)


def build_chain(B, lam, m: int, tol: float = DEFAULT_TOL) -> EigenChain:
    """A chain of length m for eigenvalue lam of B (scaled convention)."""
    Barr = np.asarray(B)
    A = Barr.T
    spec = spectrum_of_transpose(A.tolist() if not np.iscomplexobj(A) else A, tol)
    lam = complex(lam)
    best = None
    for c in spec.chains:
        if abs(c.lam - lam) <= max(tol, 1e-9) * max(1.0, abs(lam)) and c.m >= m:
            if best is None or c.m > best.m:
                best = c
    if best is None:
        raise SpectralError(f"no chain of length {m} for eigenvalue {format_number(lam)}")
    if best.m == m:
        return best
    # a longer chain: its prefix of length m is a valid chain
    ev = best.exact_vectors[:m] if best.exact_vectors is not None else None
    return EigenChain(best.lam, best.vectors[:m], best.exact_lam, ev)


# ---------------------------------------------------------------------------
# common eigenvectors of a family

@dataclass(frozen=True, eq=False)
class CommonEigen:
    vector: np.ndarray  # complex
    lams: tuple  # complex eigenvalue per matrix
    exact_vector: tuple | None = None
    exact_lams: tuple | None = None

    @property
    def is_real(self):
        return all(complex(l).imag == 0 for l in self.lams) and not np.any(np.imag(self.vector))


@dataclass(frozen=True, eq=False)
class CommonSpectrum:
    eigen: tuple
    exact: bool
    zeta: int | None = None
    chains: tuple = ()  # chains of B_zeta whose nu^0 is a common eigenvector
    zeta_spectrum: SpectralData | None = None

    def find(self, v, tol=1e-8):
        v = np.asarray(v, dtype=complex)
        for e in self.eigen:
            M = np.array([e.vector, v])
            if np.linalg.matrix_rank(M, tol * max(1.0, np.abs(M).max())) == 1:
                return e
        return None


def commutator_norm(mats) -> float:
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            a, b = np.asarray(mats[i], float), np.asarray(mats[j], float)
            worst = max(worst, float(np.linalg.norm(a @ b - b @ a)))
    return worst


def _pivot_rows_exact(V):
    """Indices of rows making the n x k basis matrix V invertible."""
    Vt = X.transpose(V)
    return X.rref(Vt)[1]


def _common_exact(mats):
    n = len(mats[0])
    Bs = [X.qmat(m) for m in mats]
    found = []

    def rec(V, j, lams):
        # V: list of basis vectors (each length n)
        if j == len(Bs):
            found.append((V, lams))
            return
        B = Bs[j]
        Vcols = X.transpose(V)  # n x k
        BV = X.matmul(B, Vcols)
        rows = _pivot_rows_exact(Vcols)
        VR = [Vcols[r] for r in rows]
        BVR = [BV[r] for r in rows]
        M = X.matmul(_inverse_exact(VR), BVR)
        cands = _exact_candidates(M)
        if cands is None:
            raise _NotExact()
        for mu in cands:
            shifted = [[a - mu * b for a, b in zip(rb, rv)] for rb, rv in zip(BV, Vcols)]
            cs = X.nullspace(shifted)
            if not cs:
                continue
            newV = [X.matvec(Vcols, c) for c in cs]
            newV = _echelon_basis_exact(newV)
            rec(newV, j + 1, lams + (mu,))

    rec([[X.QI(1) if i == j else X.QI() for i in range(n)] for j in range(n)], 0, ())
    return found


class _NotExact(Exception):
    pass


def _inverse_exact(M):
    k = len(M)
    aug = [list(r) + [X.QI(1) if i == j else X.QI() for j in range(k)] for i, r in enumerate(M)]
    R, piv = X.rref(aug)
    if piv[:k] != list(range(k)):
        raise SpectralError("singular restriction")
    return [r[k:] for r in R]


def _exact_candidates(M):
    """Eigenvalues of a small Q(i) matrix, exactly, or None."""
    if all(x.im == 0 for r in M for x in r):
        ev = X.exact_eigenvalues([[x.re for x in r] for r in M])
        return None if ev is None else [lam for lam, _ in ev]
    # complex restriction: round float eigenvalues and verify exactly
    arr = np.array([[complex(x) for x in r] for r in M])
    out = []
    for v in np.linalg.eigvals(arr):
        q = X.QI(Fraction(v.real).limit_denominator(10 ** 4),
                 Fraction(v.imag).limit_denominator(10 ** 4))
        if q in out:
            continue
        if X.rank(X.shift(M, q)) < len(M):
            out.append(q)
        else:
            return None
    return sorted(out, key=lambda q: (q.re, q.im))


def _echelon_basis_exact(V):
    R, piv = X.rref(V)
    return [r for r in R if any(r)]


def _common_float(mats, tol):
    n = mats[0].shape[0]
    scale = max(max(np.linalg.norm(m, 2) for m in mats), 1.0)
    found = []

    def rec(V, j, lams):  # V: n x k orthonormal columns
        if j == len(mats):
            found.append((V, lams))
            return
        B = mats[j]
        M = V.conj().T @ B @ V
        vals = np.linalg.eigvals(M) if M.size else np.array([])
        for c in _cluster(list(vals), 1e-7 * scale):
            mu = complex(np.mean(c))
            if abs(mu.imag) <= 1e-10 * scale:
                mu = complex(mu.real, 0.0)
            S = (B - mu * np.eye(n)) @ V
            null = _svd_null(S, 1e-8 * scale / max(scale, 1.0))
            if not null:
                continue
            C = np.array(null).T
            W = V @ C
            q, _ = np.linalg.qr(W)
            rec(q, j + 1, lams + (mu,))

    rec(np.eye(n, dtype=complex), 0, ())
    return found


def _float_basis(W):
    """Canonical basis of span(W columns): reduced echelon, leading entries 1."""
    W = np.asarray(W, dtype=complex)
    k = W.shape[1]
    if k == 1:
        v = W[:, 0]
        p = _leading_index(v)
        v = v / v[p]
        v = np.where(np.abs(v) < 1e-13, 0.0, v)
        return [v]
    R = W.T.copy()
    rows, cols = R.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(R[r:, c])))
        if abs(R[p, c]) < 1e-9:
            continue
        R[[r, p]] = R[[p, r]]
        R[r] = R[r] / R[r, c]
        for i in range(rows):
            if i != r:
                R[i] = R[i] - R[i, c] * R[r]
        r += 1
    out = []
    for v in R[:r]:
        out.append(np.where(np.abs(v) < 1e-13, 0.0, v))
    return out


def common_spectrum(mats, tol: float = DEFAULT_TOL, require_commuting: bool = True,
                    designate: bool = False) -> CommonSpectrum:
    """Simultaneous eigenvectors of the matrices ``mats`` (these are the B_j).

    Args:
        mats: list of square real matrices.
        require_commuting: raise if some commutator exceeds ``tol``-scaled size.
        designate: also pick zeta (longest chain, ties to the smallest index)
            and attach the chains of B_zeta whose nu^0 is a common eigenvector.
    """
    arrs = [np.asarray(m, dtype=float) for m in mats]
    if not arrs:
        raise SpectralError("empty family")
    n = arrs[0].shape[0]
    scale = max(max(np.linalg.norm(a, 2) for a in arrs), 1.0)
    if require_commuting and commutator_norm(arrs) > max(tol, 1e-10) * scale * scale:
        raise SpectralError("matrices do not commute")
    lists = [a.tolist() for a in arrs]
    eigen = []
    is_exact = all(X.is_rational_matrix(m) for m in lists)
    if is_exact:
        try:
            for V, lams in _common_exact([[[X.to_fraction(v) for v in r] for r in m] for m in lists]):
                for v in V:
                    s = X.primitive_scale(v)
                    v = [x * s for x in v]
                    eigen.append(CommonEigen(X.as_complex_vector(v), tuple(complex(l) for l in lams),
                                             tuple(v), tuple(lams)))
        except _NotExact:
            is_exact = False
            eigen = []
    if not is_exact:
        for V, lams in _common_float(arrs, tol):
            real = all(complex(l).imag == 0 for l in lams)
            for v in _float_basis(V):
                if real and np.max(np.abs(np.imag(v))) < 1e-10:
                    v = np.real(v).astype(complex)
                # Rayleigh quotients are more accurate than the cluster means
                rq = tuple(complex(np.vdot(v, a @ v) / np.vdot(v, v)) for a in arrs)
                if real:
                    rq = tuple(complex(l.real, 0.0) for l in rq)
                eigen.append(CommonEigen(v, rq))
    if not eigen:
        raise SpectralError("the family has no common eigenvector")
    eigen.sort(key=lambda e: tuple((l.real, l.imag) for l in e.lams))
    cs = CommonSpectrum(tuple(eigen), is_exact)
    if not designate:
        return cs
    specs = [spectrum_of_transpose(a.T.tolist(), tol) for a in arrs]
    longest = [max((c.m for c in s.chains), default=0) for s in specs]
    zeta = int(np.argmax(longest))
    chains = []
    for c in specs[zeta].chains:
        if c.m >= 2 and cs.find(c.vectors[0]) is not None:
            chains.append(c)
    return CommonSpectrum(tuple(eigen), is_exact, zeta, tuple(chains), specs[zeta])


__all__ = [
    "EigenChain", "SpectralData", "CommonEigen", "CommonSpectrum", "spectrum_of_transpose",
    "build_chain", "common_spectrum", "commutator_norm", "divisor_text", "format_number",
]
