import numpy as np
import pytest

from conftest import load, oracle_drift, scipy_trajectory
from fint.errors import ConstructionError
from fint.reducible import check_reduction, reduced_forcing, reducible_integrals
from fint.system import SystemSpec


def with_reduction(spec, **changes):
    doc = spec.to_json()
    doc["reduction"].update(changes)
    return SystemSpec.from_json(doc)


def test_example_3_1_reduction_residual():
    rep = check_reduction(load("ex3_1"), points=50)
    assert rep.passed
    assert rep.residual < 1e-8
    assert rep.min_det == pytest.approx(1.0)


def test_example_3_1_integrals_match_closed_forms(rng):
    spec = load("ex3_1")
    res = reducible_integrals(spec)
    assert res.formatted() == ["(-t*x1+(1+t^2)*x2)*exp(-t)", "(x1-t*x2)*exp(-2*t)"]
    ref = [lambda t, x: (-t * x[0] + (1 + t * t) * x[1]) * np.exp(-t),
             lambda t, x: (x[0] - t * x[1]) * np.exp(-2 * t)]
    for F, G in zip(res.integrals, ref):
        for t, x in zip(rng.uniform(0, 1, 5), rng.normal(size=(5, 2))):
            assert F.evaluate(t, x) == pytest.approx(G(t, x), rel=1e-13, abs=1e-15)
        for x0 in rng.uniform(-1, 1, (5, 2)):
            assert oracle_drift(spec, F, x0) < 1e-8


def test_example_3_5_matches_closed_forms(rng):
    spec = load("ex3_5")
    assert check_reduction(spec).passed
    res = reducible_integrals(spec)
    assert len(res) == 3

    def p(t, x):
        return x[0] - t * x[1] + t * t * x[2]

    ref = [lambda t, x: x[0] / t - x[1] + t * x[2],
             lambda t, x: t * t * x[2] / p(t, x) - np.log(t),
             lambda t, x: (2 * t * x[1] * p(t, x) - t ** 4 * x[2] ** 2) / p(t, x) ** 2]
    pts = [(t, x) for t, x in zip(rng.uniform(1, 2, 6), rng.normal(size=(6, 3)) + [3, 0, 0])]
    vals = [[F.evaluate(t, x) for F in res.integrals] for t, x in pts]
    # the chain-time and Psi forms coincide with the printed ones
    assert [row[0] for row in vals] == pytest.approx([ref[1](t, x) for t, x in pts], rel=1e-12)
    assert [row[1] for row in vals] == pytest.approx([ref[2](t, x) for t, x in pts], rel=1e-12)
    x0 = np.array([2.0, 0.3, 0.2])
    for G in ref:
        ts = np.linspace(1, 2, 21)
        xs = scipy_trajectory(spec, x0, ts)
        v = np.array([G(t, x) for t, x in zip(ts, xs)])
        assert np.ptp(v) / (1 + abs(v[0])) < 1e-9
    for F in res.integrals:
        assert oracle_drift(spec, F, x0) < 1e-8


def test_identity_reduction_reduces_to_constant_case():
    doc = {"n": 2, "terms": [{"alpha": "1", "A": [[1, 0], [0, 2]]}],
           "reduction": {"g": [["1", "0"], ["0", "1"]], "B": [[1, 0], [0, 2]]}}
    res = reducible_integrals(SystemSpec.from_json(doc))
    assert res.formatted() == ["x1*exp(-t)", "x2*exp(-2*t)"]
    assert res.provenance == ["reduced-eigen-time"] * 2


def test_wrong_reduction_rejected():
    spec = with_reduction(load("ex3_1"), B=[[1, 0], [0, 3]])
    rep = check_reduction(spec)
    assert not rep.passed and rep.residual > 1e-3
    with pytest.raises(ConstructionError, match="reduction identity"):
        reducible_integrals(spec)


def test_singular_transform_rejected():
    doc = {"n": 2, "terms": [{"alpha": "1", "A": [[0, 0], [0, 0]]}],
           "reduction": {"g": [["1", "1"], ["1", "1"]], "B": [[0, 0], [0, 0]]}}
    with pytest.raises(ConstructionError, match="singular"):
        reducible_integrals(SystemSpec.from_json(doc))


def test_autonomous_mode_rejected():
    with pytest.raises(ConstructionError):
        reducible_integrals(load("ex3_1"), "autonomous")


def test_forced_reducible():
    spec = SystemSpec.from_json({**load("ex3_1").to_json(), "forcing": ["1", "t"]})
    res = reducible_integrals(spec)
    assert res.mode == "forced" and len(res) == 2
    assert all(tag.startswith("reduced-") for tag in res.provenance)
    f = reduced_forcing(spec)
    t = 0.4
    gf = np.array([[-t, 1 + t * t], [1, -t]]) @ np.array([1.0, t])
    assert [e.evaluate(t) for e in f] == pytest.approx(gf.tolist())
    for x0 in ([0.3, 0.5], [-1.0, 0.2]):
        for F in res.integrals:
            assert oracle_drift(spec, F, x0) < 1e-8
