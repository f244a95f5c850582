import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import load, scipy_trajectory
from fint.autonomous import basis, complex_autonomous_integrals
from fint.errors import DomainError, QuadratureError, VerificationError
from fint.expr import Div, EvalPoint, LinForm, Mul, const
from fint.numerics import (Trajectory, adaptive_quad, eigen_identity_residual, independence_rank,
                           integrate_trajectory, lie_residual, numeric_rank, sample_x0,
                           verify_constancy, verify_integrals)
from fint.reducible import reducible_integrals
from fint.scalar import parse_scalar
from fint.spectral import spectrum_of_transpose
from fint.system import constant_system

EX1_1 = [[1, -2, 0, -1], [-1, 4, -1, 2], [0, 2, 1, 1], [2, -4, 2, -2]]
EX1_2 = [[2, 1, 0], [1, 3, -1], [-1, 2, 3]]


def F24():
    u = LinForm((2, 2, 1, 1))
    return Div(Mul(u, u), LinForm((0, 2, 0, 1)))


# ---------------------------------------------------------------------------
# quadrature


@pytest.mark.parametrize("text,a,b,expected", [
    ("sin(t)", 0.0, math.pi, 2.0),
    ("2*t*exp(t^2)", 0.0, 1.0, math.e - 1),
    ("1/t", 1.0, 2.0, math.log(2)),
])
def test_quadrature_examples(text, a, b, expected):
    assert adaptive_quad(parse_scalar(text), a, b, 1e-10) == pytest.approx(expected, abs=1e-10)


def test_quadrature_reversed_and_empty():
    f = parse_scalar("cos(t)")
    assert adaptive_quad(f, 1.0, 0.0) == pytest.approx(-math.sin(1.0), abs=1e-10)
    assert adaptive_quad(f, 0.5, 0.5) == 0.0


def test_quadrature_singular_integrand():
    with pytest.raises((DomainError, QuadratureError)):
        adaptive_quad(parse_scalar("1/t"), 0.0, 1.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.integers(0, 4))
def test_quadrature_polynomial_exact(a, b, k):
    # Simpson is exact for cubics; higher powers converge to tolerance
    f = parse_scalar(f"t^{k}")
    exact = (b ** (k + 1) - a ** (k + 1)) / (k + 1)
    assert adaptive_quad(f, a, b, 1e-10) == pytest.approx(exact, abs=1e-9 * (1 + abs(exact)))


# ---------------------------------------------------------------------------
# trajectories


def test_zero_system_constant_trajectory():
    spec = constant_system(np.zeros((2, 2)))
    tr = integrate_trajectory(spec, [0.3, -0.7])
    assert np.all(tr.x == np.array([0.3, -0.7]))
    assert tr.t.shape[0] >= 201 and np.all(np.diff(tr.t) > 0)


def test_exponential_growth_reaches_e():
    spec = constant_system([[1.0]])
    tr = integrate_trajectory(spec, [1.0], (0.0, 1.0), 1e-10)
    assert tr.x[-1, 0] == pytest.approx(math.e, abs=1e-8)


@pytest.mark.parametrize("name", ["ex1_14", "ex2_4", "ex2_10", "ex3_1"])
def test_trajectories_match_scipy(name):
    spec = load(name)
    x0 = np.linspace(0.3, 0.9, spec.n)
    tr = integrate_trajectory(spec, x0, samples=50)
    ref = scipy_trajectory(spec, x0, tr.t)
    assert np.max(np.abs(tr.x - ref)) / (1 + np.abs(ref).max()) < 1e-8


def test_trajectory_rejects_wrong_length():
    with pytest.raises(ValueError):
        integrate_trajectory(constant_system(np.eye(2)), [1.0])


# ---------------------------------------------------------------------------
# constancy


def test_constancy_on_trivial_system():
    spec = constant_system(np.zeros((2, 2)))
    r = verify_constancy(LinForm((1, 0)), integrate_trajectory(spec, [0.5, 0.1]))
    assert r.max_drift == 0.0 and r.segments == 1


def test_example_1_2_trajectory():
    c = [c for c in spectrum_of_transpose(EX1_2).chains if c.lam.imag > 0][0]
    F = complex_autonomous_integrals(c)[0]
    spec = constant_system(EX1_2)
    r = verify_constancy(F, integrate_trajectory(spec, [1.0, 0.0, 0.0]))
    assert r.rel_drift < 1e-7


def test_example_1_1_f24_drift():
    spec = constant_system(EX1_1)
    x0, m = sample_x0(np.random.default_rng(1), 4, [F24()])
    assert m > 0.1
    r = verify_constancy(F24(), integrate_trajectory(spec, x0))
    assert r.rel_drift < 1e-7


def test_non_integral_is_flagged():
    spec = constant_system([[1.0]])
    x0 = 0.7
    tr = integrate_trajectory(spec, [x0])
    r = verify_constancy(LinForm((1.0,)), tr)
    assert r.max_drift == pytest.approx(x0 * (math.e - 1), rel=1e-8)
    rep = verify_integrals(spec, [LinForm((1.0,))], trajectories=3)
    assert not rep.passed and rep.offenders()[0].index == 0


def test_segments_split_at_sign_change():
    # x' = (1, 0): x1 passes through zero, so 1/x1 is checked on two segments
    spec = constant_system(np.zeros((2, 2)), ["1", "0"], window=(0, 2))
    F = Div(LinForm((0, 1)), LinForm((1, 0)))
    r = verify_constancy(F, integrate_trajectory(spec, [-1.0, 1.0]))
    assert r.crossings == 1 and r.segments == 2


def test_entirely_singular_trajectory():
    spec = constant_system(np.zeros((2, 2)))
    F = Div(const(1.0), LinForm((1, 0)))
    with pytest.raises(VerificationError):
        verify_constancy(F, integrate_trajectory(spec, [0.0, 1.0]))


def test_lie_residual_and_eigen_identity():
    spec = constant_system(EX1_1)
    x = np.array([0.2, 0.5, -0.1, 0.9])
    assert lie_residual(F24(), spec, 0.0, x) < 1e-8
    assert lie_residual(LinForm((1, 0, 0, 0)), spec, 0.0, x) > 1e-3
    tr = integrate_trajectory(spec, x, samples=400)
    assert eigen_identity_residual(LinForm((0, 2, 0, 1)), 2.0, spec, tr) < 1e-7
    assert eigen_identity_residual(LinForm((0, 2, 0, 1)), 1.0, spec, tr) > 0.1


def test_convergence_monotone_in_tolerance():
    # tighter integration tolerances do not increase the drift
    cases = [(constant_system(EX1_1), F24(), [1.0, 0.6, 0.8, 0.4]),
             (load("ex1_5"), basis(load("ex1_5"), "full").integrals[1], [1.2, 0.7, 0.7]),
             (load("ex3_1"), reducible_integrals(load("ex3_1")).integrals[0], [1.2, 0.7])]
    for spec, F, x0 in cases:
        d = [verify_constancy(F, integrate_trajectory(spec, x0, tol=tol)).rel_drift
             for tol in (1e-6, 1e-8, 1e-10)]
        assert d[2] <= d[1] * 1.5 + 1e-14 and d[1] <= d[0] * 1.5 + 1e-14


# ---------------------------------------------------------------------------
# rank


def test_rank_examples():
    p = EvalPoint(0.0, np.array([0.3, 0.8]))
    assert independence_rank([LinForm((1, 0)), LinForm((0, 1)), LinForm((1, 1))], p) == 2
    assert independence_rank([const(3.0)], p) == 0
    res = basis(constant_system(EX1_1))
    assert independence_rank(res.integrals, EvalPoint(0.0, np.ones(4))) == 3


def test_rank_refuses_singular_point():
    F = Div(const(1.0), LinForm((1, 0)))
    with pytest.raises(DomainError):
        independence_rank([F], EvalPoint(0.0, np.array([0.0, 1.0])))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.integers(0, 10**6))
def test_numeric_rank_matches_construction(r, cols, seed):
    rng = np.random.default_rng(seed)
    r = min(r, cols)
    M = rng.normal(size=(5, r)) @ rng.normal(size=(r, cols))
    assert numeric_rank(M) == np.linalg.matrix_rank(M)


def test_sample_x0_respects_band():
    rng = np.random.default_rng(0)
    F = Div(const(1.0), LinForm((1, 1, 0)))
    for _ in range(10):
        x, m = sample_x0(rng, 3, [F])
        assert np.linalg.norm(x) <= 1 and abs(x[0] + x[1]) > 0.1 and m > 0.1


def test_verify_report_json_fields():
    spec = constant_system(EX1_1)
    res = basis(spec)
    rep = verify_integrals(spec, res.integrals, res.provenance, trajectories=4)
    assert rep.passed and rep.rank == 3
    doc = rep.to_json()
    assert list(doc) == ["passed", "rank", "expected_rank", "rank_point", "trajectories", "tol",
                         "integrals"]
    assert all(c["max_drift"] >= 0 and c["rel_drift"] >= 0 for c in doc["integrals"])


def test_trajectory_dataclass_fields():
    tr = integrate_trajectory(constant_system(np.eye(1)), [1.0])
    assert isinstance(tr, Trajectory)
    assert tr.steps > 0 and tr.max_error >= 0
