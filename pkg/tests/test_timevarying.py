import numpy as np
import pytest

from conftest import load, oracle_drift, scipy_trajectory
from fint.errors import ClassificationError, ConstructionError
from fint.expr import EvalPoint
from fint.numerics import independence_rank
from fint.spectral import EigenChain
from fint.system import SystemSpec
from fint.timevarying import (algebraic_reducible_integrals, basis, classify_system,
                              exponent_solutions, frozen_field_residual, ld_autonomous_integrals,
                              ld_chain_data, ld_nonautonomous_integrals, normalized_terms,
                              psi_lie_derivatives, triangular_integrals)

R2 = np.sqrt(2.0)


def spec_of(doc):
    return SystemSpec.from_json(doc)


def drifts(spec, res, seeds=3, lo=0.5, hi=1.5):
    rng = np.random.default_rng(7)
    out = []
    for _ in range(seeds):
        x0 = rng.uniform(lo, hi, spec.n)
        out += [oracle_drift(spec, F, x0) for F in res.integrals]
    return max(out)


def traj_values(spec, G, x0, points=21):
    ts = np.linspace(*spec.window, points)
    xs = scipy_trajectory(spec, x0, ts)
    v = np.array([G(t, x) for t, x in zip(ts, xs)])
    return v


# ---------------------------------------------------------------------------
# classification


@pytest.mark.parametrize("name,kind", [("ex1_1", "constant"), ("ex3_1", "reducible"),
                                       ("ex2_6", "lappo_danilevskii"), ("ex2_4", "triangular"),
                                       ("ex2_10", "lappo_danilevskii"), ("ex2_23", "lappo_danilevskii"),
                                       ("ex2_2", "lappo_danilevskii"), ("ex2_3", "lappo_danilevskii")])
def test_classification_of_examples(name, kind):
    assert classify_system(load(name)).kind == kind


def test_algebraic_reducible_class():
    spec = spec_of({"n": 2, "terms": [{"alpha": "1", "A": [[1, 0], [1, 0]]},
                                      {"alpha": "t", "A": [[0, 0], [0, 1]]}]})
    c = classify_system(spec)
    assert c.kind == "algebraic_reducible"
    assert c.evidence["constant eigenvectors"] == 1
    # one constant eigenvector cannot give two integrals
    with pytest.raises(ConstructionError, match="deficiency"):
        algebraic_reducible_integrals(spec)


def test_unclassifiable_system():
    spec = spec_of({"n": 2, "terms": [{"alpha": "1", "A": [[0, 1], [0, 0]]},
                                      {"alpha": "t", "A": [[0, 0], [1, 0]]}]})
    with pytest.raises(ClassificationError):
        classify_system(spec)


def test_class_hint_honoured_and_rejected():
    doc = {"n": 3, "terms": [{"alpha": "cos(t)", "A": [[0, 0, 0], [-1, 1, 0], [-1, 1, 0]]},
                             {"alpha": "t", "A": [[1, 0, 0], [1, 0, 0], [1, -1, 1]]}],
           "class_hint": "algebraic_reducible"}
    c = classify_system(spec_of(doc))
    assert c.kind == "algebraic_reducible" and "class taken from class_hint" in c.notes
    doc["class_hint"] = "triangular"
    c = classify_system(spec_of(doc))
    assert c.kind == "lappo_danilevskii"
    assert any("failed its test" in s for s in c.notes)


def test_normalized_terms_merge_constant_alphas():
    spec = spec_of({"n": 2, "terms": [{"alpha": "2", "A": [[1, 0], [0, 0]]},
                                      {"alpha": "1", "A": [[0, 1], [0, 0]]},
                                      {"alpha": "t", "A": [[0, 0], [0, 1]]}]})
    terms = normalized_terms(spec)
    assert len(terms) == 2
    A = sum(a.evaluate(0.7) * M for a, M in terms)
    assert np.allclose(A, spec.A_at(0.7))


# ---------------------------------------------------------------------------
# algebraic reducible


@pytest.mark.parametrize("name", ["ex2_2", "ex2_3"])
def test_algebraic_reducible_constructor(name):
    spec = load(name)
    res = algebraic_reducible_integrals(spec)
    assert len(res) == 3 and set(res.provenance) == {"algebraic-reducible"}
    assert drifts(spec, res) < 1e-7
    p = EvalPoint(spec.window[0] + 0.3, np.array([1.2, 0.4, -0.7]))
    assert independence_rank(res.integrals, p) == 3


def test_example_2_3_modulus_and_phase():
    spec = load("ex2_3")
    res = algebraic_reducible_integrals(spec)
    text = res.formatted()
    assert "(x1^2+(-x2+x3)^2)*exp(-2*(∫[0,t] τ dτ))" in text
    assert "(x1-x2)*exp(-(∫[0,t] cos(τ) dτ))" in text


# ---------------------------------------------------------------------------
# triangular


def test_example_2_4_against_closed_forms(rng):
    spec = load("ex2_4")
    res = triangular_integrals(spec)
    assert len(res) == 3 and res.mode == "forced"

    def F1(t, y):
        return y[2] / t ** 2 - t ** 2

    def F2(t, y):
        return (np.exp(-t) * y[1] - 5 / 3 * t * y[2] + 2 / 3 * t ** 5 - 4 * t
                - 2 * (t ** 3 + 3 * t ** 2 + 6 * t + 6) * np.exp(-t))

    def F3(t, y):
        return (t * y[0] + 0.5 * t ** 2 * np.exp(-t) * y[1] + 0.5 * (3 - t) * t ** 2 * y[2]
                - 0.5 * t ** 3 * (2 * t ** 4 + t ** 3 + 4) - t ** 2 * (t ** 3 + 3 * t ** 2 + 6 * t + 6) * np.exp(-t))

    x0 = np.array([0.6, -1.1, 0.8])
    for G in (F1, F2, F3):
        v = traj_values(spec, G, x0)
        assert np.ptp(v) / (1 + abs(v[0])) < 1e-9
    assert drifts(spec, res) < 1e-6
    # our F_k is an affine combination of the printed F_1 .. F_k
    pts = [(t, x) for t, x in zip(rng.uniform(1, 2, 8), rng.normal(size=(8, 3)))]
    Gs = (F1, F2, F3)
    for k, F in enumerate(res.integrals, start=1):
        a = np.array([[G(t, x) for G in Gs[:k]] + [1.0] for t, x in pts])
        b = np.array([F.evaluate(t, x) for t, x in pts])
        coef, *_ = np.linalg.lstsq(a, b, rcond=None)
        assert np.max(np.abs(a @ coef - b)) < 1e-8


def test_triangular_identity_at_anchor(rng):
    spec = load("ex2_4")
    res = triangular_integrals(spec)
    t0 = spec.anchor
    for _ in range(5):
        x = rng.normal(size=3)
        for tau, F in enumerate(res.integrals, start=1):
            # phi is anchored at t0, so phi(t0) = 1
            assert abs(F.evaluate(t0, x) - x[3 - tau]) <= 1e-12


def test_triangular_rejects_lower_entries():
    with pytest.raises(ConstructionError):
        triangular_integrals(load("ex2_6"))


def test_homogeneous_triangular_system():
    spec = spec_of({"n": 2, "terms": [{"alpha": "1", "A": [[1, 1], [0, 0]]},
                                      {"alpha": "t", "A": [[0, 0], [0, 1]]}]})
    res = triangular_integrals(spec, "full")
    F1 = res.integrals[0]
    x, t = np.array([0.4, 0.9]), 0.8
    assert F1.evaluate(t, x) == pytest.approx(x[1] * np.exp(-t * t / 2), rel=1e-10)
    assert drifts(spec, res) < 1e-8


# ---------------------------------------------------------------------------
# Lappo-Danilevskii


def test_example_2_6_integrals_proportional_to_closed_forms(rng):
    spec = load("ex2_6")
    res = ld_nonautonomous_integrals(spec)
    assert len(res) == 2
    assert drifts(spec, res) < 1e-7

    def P(s):
        lam = 1 + s * R2

        def G(t, x):
            return (lam * x[0] + x[1]) * np.exp(-t * t / 2 + lam * np.cos(t))
        return G

    pts = [(t, x) for t, x in zip(rng.uniform(0, 2, 6), rng.uniform(0.5, 1.5, (6, 2)))]
    for G in (P(-1), P(1)):
        found = False
        for F in res.integrals:
            r = [F.evaluate(t, x) / G(t, x) for t, x in pts]
            found |= np.ptp(r) < 1e-9 * np.max(np.abs(r))
        assert found


def test_example_2_8_integrals():
    spec = load("ex2_8")
    res = ld_nonautonomous_integrals(spec)
    assert len(res) == 3
    assert drifts(spec, res) < 1e-7


def test_example_2_10_nonautonomous_match_closed_forms(rng):
    spec = load("ex2_10")
    res = ld_nonautonomous_integrals(spec)
    ref = [lambda t, x: np.exp(2 * np.cosh(t) - np.sin(np.exp(t))) * (x[0] - x[1] - x[2]),
             lambda t, x: np.exp(np.sin(np.exp(t))) * (x[1] - x[2]),
             lambda t, x: np.exp(-2 * np.cosh(t) - np.sin(np.exp(t))) * (x[0] + x[1] + x[2])]
    pts = [(t, x) for t, x in zip(rng.uniform(0, 1, 6), rng.uniform(0.5, 1.5, (6, 3)))]
    for F, G in zip(res.integrals, ref):
        r = [F.evaluate(t, x) / G(t, x) for t, x in pts]
        assert np.ptp(r) < 1e-9 * np.max(np.abs(r))


def test_example_2_10_exponent_system():
    R = [[-2, 1], [0, -1], [2, 1]]
    (h,) = exponent_solutions(R)
    assert [float(v) for v in h] == [1.0, 2.0, 1.0]


def test_example_2_10_autonomous_integral(rng):
    spec = load("ex2_10")
    res = ld_autonomous_integrals(spec)
    (F,) = res.integrals
    assert res.provenance == ["ld-autonomous"]

    def corrected(t, x):
        return (x[0] ** 2 - (x[1] + x[2]) ** 2) * (x[1] - x[2]) ** 2

    def printed(t, x):
        return (x[0] ** 2 - (x[1] - x[2]) ** 2) * (x[1] - x[2]) ** 2

    for _ in range(5):
        x = rng.normal(size=3)
        assert F.evaluate(0.0, x) == pytest.approx(corrected(0, x), rel=1e-12, abs=1e-14)
    pts = [rng.normal(size=3) for _ in range(20)]
    assert frozen_field_residual(F, [A for _, A in spec.terms], pts) < 1e-5
    x0 = np.array([1.3, 0.2, -0.4])
    v = traj_values(spec, corrected, x0)
    assert np.ptp(v) / (1 + abs(v[0])) < 1e-9
    # the product as printed in the source is not conserved
    w = traj_values(spec, printed, x0)
    assert np.ptp(w) / (1 + abs(w[0])) > 1e-3


def test_example_2_6_has_no_autonomous_integral():
    with pytest.raises(ConstructionError, match="trivial solution"):
        ld_autonomous_integrals(load("ex2_6"))


def test_frozen_field_residual_detects_non_integral():
    from fint.expr import LinForm
    mats = [np.array([[0, 1], [-1, 0]])]
    assert frozen_field_residual(LinForm((1, 0)), mats, [np.array([0.3, 1.0])]) > 0.1


def test_example_2_11_autonomous():
    spec = load("ex2_11")
    res = ld_autonomous_integrals(spec)
    assert len(res) >= 1
    x = np.array([0.7, 0.4, -0.2, 1.1])
    ref = (2 * x[1] + x[3]) * (x[0] + x[2])
    vals = [F.evaluate(0.0, x) for F in res.integrals]
    assert any(abs(v - ref) < 1e-12 for v in vals)
    for F in res.integrals:
        assert oracle_drift(spec, F, x) < 1e-9


def test_psi_lie_derivatives_example_2_23():
    spec = load("ex2_23")
    mats = [A for _, A in spec.terms]
    vecs = [np.array(v, complex) for v in ((1, 0, 1), (0, 1, 0), (0, 2, 2))]
    xs = np.random.default_rng(3).normal(size=(10, 3))
    xs[:, 0] += 3
    psi, _ = psi_lie_derivatives(vecs, mats[0], xs)
    p0 = xs[:, 0] + xs[:, 2]
    assert np.allclose(psi[0], xs[:, 1] / p0)
    assert np.allclose(psi[1], (2 * p0 * (xs[:, 1] + xs[:, 2]) - xs[:, 1] ** 2) / p0 ** 2)
    d = ld_chain_data(EigenChain(-1 + 0j, tuple(vecs)), mats, 0)
    assert d.valid
    assert np.array_equal(d.mu.real, [[-1, 0], [1, 2], [0, 2]])


def test_example_2_23_against_closed_forms(rng):
    spec = load("ex2_23")
    res = ld_nonautonomous_integrals(spec)
    assert res.provenance == ["ld-forced-chain"] * 3

    def F0(t, x):
        return (x[0] + x[2] - t + 0.5) * np.exp(t)

    def F1(t, x):
        return (x[1] + 0.5) * np.exp(t) - t * (t + 1) * F0(t, x)

    def F2(t, x):
        return ((2 * x[1] + 2 * x[2] + 2 * t * t - 3 * t + 4) * np.exp(t)
                - t * t * (t * t + 2 * t + 2) * F0(t, x) - 2 * t * (t + 1) * F1(t, x))

    x0 = np.array([0.9, 0.2, 0.4])
    for G in (F0, F1, F2):
        v = traj_values(spec, G, x0)
        assert np.ptp(v) / (1 + abs(v[0])) < 1e-9
    assert drifts(spec, res) < 1e-7
    # anchored quadratures differ from the printed antiderivatives by constants
    pts = [(t, x) for t, x in zip(rng.uniform(0, 1, 6), rng.normal(size=(6, 3)))]
    d = [res.integrals[0].evaluate(t, x) - F0(t, x) for t, x in pts]
    assert np.ptp(d) < 1e-9
    k01 = [res.integrals[1].evaluate(t, x) for t, x in pts]
    A = np.array([[F0(t, x), F1(t, x), 1.0] for t, x in pts])
    coef, *_ = np.linalg.lstsq(A, k01, rcond=None)
    assert np.max(np.abs(A @ coef - k01)) < 1e-8


def test_example_2_23_homogeneous_chain():
    spec = load("ex2_23").homogeneous()
    res = ld_nonautonomous_integrals(spec)
    assert res.provenance.count("ld-chain") == 2
    assert drifts(spec, res) < 1e-7
    auto = ld_autonomous_integrals(spec)
    assert len(auto) == 1
    assert oracle_drift(spec, auto.integrals[0], [1.1, 0.3, 0.2]) < 1e-9


def test_example_2_17_mu_pattern():
    spec = load("ex2_17")
    res = ld_nonautonomous_integrals(spec)
    assert drifts(spec, res) < 1e-7
    assert "ld-chain" in res.provenance
    auto = ld_autonomous_integrals(spec)
    for F in auto.integrals:
        assert oracle_drift(spec, F, [0.9, 0.2, 0.4, 0.3]) < 1e-9


def test_basis_dispatch_and_modes():
    assert basis(load("ex2_4")).kind == "triangular"
    assert basis(load("ex2_10"), "autonomous").provenance == ["ld-autonomous"]
    with pytest.raises(ConstructionError):
        basis(load("ex2_4"), "autonomous")
    with pytest.raises(ConstructionError):
        basis(load("ex1_1"), kind="constant")
