import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fint.errors import SpectralError
from fint.spectral import (build_chain, common_spectrum, commutator_norm, spectrum_of_transpose)

EX1_1 = [[1, -2, 0, -1], [-1, 4, -1, 2], [0, 2, 1, 1], [2, -4, 2, -2]]
EX1_2 = [[2, 1, 0], [1, 3, -1], [-1, 2, 3]]
EX1_4 = [[4, -5, 2], [5, -7, 3], [6, -9, 4]]
EX1_5 = [[4, -1, 0], [3, 1, -1], [1, 0, 1]]


def parallel(u, v, tol=1e-10):
    u, v = np.asarray(u, complex), np.asarray(v, complex)
    M = np.array([u / np.abs(u).max(), v / np.abs(v).max()])
    return np.linalg.svd(M, compute_uv=False)[1] < tol


def chain_residual(B, lam, vecs):
    B = np.asarray(B, complex)
    N = B - lam * np.eye(B.shape[0])
    r = [np.abs(N @ vecs[0]).max()]
    for k in range(1, len(vecs)):
        r.append(np.abs(N @ vecs[k] - k * vecs[k - 1]).max())
    return max(r)


def test_example_1_1_divisors():
    d = spectrum_of_transpose(EX1_1)
    assert d.exact
    assert d.summary() == "eigenvalues: 0, 1 (×2), 2; divisors: λ, λ−1, λ−1, λ−2"
    zero = [c for c in d.chains if c.lam == 0][0]
    assert parallel(zero.vectors[0], (-1, 1, -1, 1))


def test_zero_matrix():
    d = spectrum_of_transpose(np.zeros((3, 3)))
    assert [c.m for c in d.chains] == [1, 1, 1]
    assert all(c.lam == 0 for c in d.chains)
    V = np.array([c.vectors[0] for c in d.chains])
    assert np.linalg.matrix_rank(V) == 3


def test_example_1_5_chain_matches_reference_up_to_normalization():
    d = spectrum_of_transpose(EX1_5)
    assert len(d.chains) == 1
    c = d.chains[0]
    assert c.lam == 2 and c.m == 3
    assert c.divisor_text() == "(λ−2)³"
    B = np.array(EX1_5).T
    assert c.residuals(B) == [0.0, 0.0, 0.0]
    ref = [np.array(v, complex) for v in ((1, -1, 1), (1, 0, -1), (0, 0, 2))]
    assert chain_residual(B, 2, ref) == 0.0
    assert parallel(c.vectors[0], ref[0])
    # nu^1 is fixed only modulo nu^0
    assert np.linalg.matrix_rank(np.array([c.vectors[1] - ref[1], ref[0]])) == 1


def test_build_chain_examples():
    B = np.array(EX1_5).T
    c = build_chain(B.tolist(), 2, 3)
    assert c.residuals(B) == [0.0, 0.0, 0.0]
    c = build_chain([[5]], 5, 1)
    assert [v.tolist() for v in c.vectors] == [[1]]
    B4 = np.array(EX1_4).T
    c = build_chain(B4.tolist(), 0, 2)
    assert np.allclose(c.vectors[0], (1, -2, 1))
    assert np.linalg.matrix_rank(np.array([c.vectors[1] - np.array((0, -1, 1)), c.vectors[0]])) == 1


def test_build_chain_too_long():
    with pytest.raises(SpectralError):
        build_chain(np.array(EX1_4).T.tolist(), 0, 3)


def test_complex_chains_come_in_conjugate_pairs():
    d = spectrum_of_transpose(EX1_2)
    lams = [c.lam for c in d.chains]
    assert lams == [2, 3 - 1j, 3 + 1j]
    up = [c for c in d.chains if c.lam.imag > 0][0]
    assert parallel(up.vectors[0], (1, 1j, -1))
    down = up.conjugate()
    assert chain_residual(np.array(EX1_2).T, down.lam, down.vectors) < 1e-14


def test_common_spectrum_example_2_6():
    cs = common_spectrum([np.eye(2), [[2, 1], [1, 0]]])
    r2 = np.sqrt(2)
    found = {}
    for e in cs.eigen:
        for s in (-1, 1):
            if parallel(e.vector, (1 + s * r2, 1)):
                found[s] = e
    assert set(found) == {-1, 1}
    assert found[-1].lams[1] == pytest.approx(1 - r2, abs=1e-12)
    assert found[1].lams[1] == pytest.approx(1 + r2, abs=1e-12)


def test_common_spectrum_example_2_8():
    B1 = np.eye(3)
    B2 = np.array([[-2, 2, -1], [-1, 1, -1], [1, 0, 0]])
    cs = common_spectrum([B1, B2])
    want = {(1, -1): (1, 0, -1), (1, 1j): (1j, 1j, 1), (1, -1j): (-1j, -1j, 1)}
    for lams, v in want.items():
        e = [e for e in cs.eigen if np.allclose(e.lams, lams)]
        assert len(e) == 1 and parallel(e[0].vector, v)


def test_common_spectrum_rejects_noncommuting():
    with pytest.raises(SpectralError):
        common_spectrum([[[0, 1], [0, 0]], [[0, 0], [1, 0]]])


def test_single_matrix_common_spectrum():
    cs = common_spectrum([np.array(EX1_1).T])
    d = spectrum_of_transpose(EX1_1)
    assert len(cs.eigen) == 4
    for e in cs.eigen:
        assert any(parallel(e.vector, c.vectors[0]) or c.lam == 1 for c in d.chains)


def test_determinism():
    a = spectrum_of_transpose(EX1_5)
    b = spectrum_of_transpose(EX1_5)
    assert repr(a) == repr(b)
    f = spectrum_of_transpose(np.array(EX1_2) + 1e-3)
    g = spectrum_of_transpose(np.array(EX1_2) + 1e-3)
    assert repr(f) == repr(g)


def test_commutator_norm():
    assert commutator_norm([np.eye(2), [[1, 2], [3, 4]]]) == 0.0
    assert commutator_norm([[[0, 1], [0, 0]], [[0, 0], [1, 0]]]) > 1


def _check_invariants(A, exact_expected=None):
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    d = spectrum_of_transpose(A.tolist())
    B = A.T
    assert sum(c.m for c in d.chains) == n
    keys = [(c.lam.real, c.lam.imag, c.m) for c in d.chains]
    assert keys == sorted(keys)
    scale = max(1.0, np.abs(A).max())
    for c in d.chains:
        res = c.residuals(B)
        if d.exact:
            assert all(r == 0.0 for r in res)
        else:
            assert sum(res) < 1e-10 * scale * max(1.0, max(np.abs(v).max() for v in c.vectors))
        if c.lam.imag > 0:
            assert any(abs(o.lam - np.conj(c.lam)) < 1e-9 and o.m == c.m for o in d.chains)
    for lam, _ in d.eigenvalues():
        count = sum(1 for c in d.chains if c.lam == lam)
        N = B - lam * np.eye(n)
        assert count == n - np.linalg.matrix_rank(N, tol=1e-8 * scale)
    return d


small_int = st.integers(-4, 4)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5).flatmap(lambda n: st.lists(st.lists(small_int, min_size=n, max_size=n),
                                                     min_size=n, max_size=n)))
def test_spectral_invariants_random_integer(A):
    _check_invariants(A)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10**6))
def test_spectral_invariants_jordan_blocks(n, seed):
    rng = np.random.default_rng(seed)
    J = np.diag(rng.integers(-2, 3, n)).astype(float)
    m = int(rng.integers(2, n + 1))
    J[:m, :m] = np.diag(np.full(m, J[0, 0])) + np.diag(np.ones(m - 1), 1)
    P = np.eye(n, dtype=int)
    for _ in range(2 * n):
        i, j = rng.choice(n, 2, replace=False)
        P[i] += int(rng.integers(-1, 2)) * P[j]
    A = P @ J @ np.round(np.linalg.inv(P))
    d = _check_invariants(A)
    assert d.exact
    assert max(c.m for c in d.chains) >= m


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10**6))
def test_spectral_invariants_float_path(n, seed):
    A = np.random.default_rng(seed).standard_normal((n, n))
    d = _check_invariants(A)
    assert not d.exact
