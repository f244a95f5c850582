import json
from pathlib import Path

import numpy as np
import pytest

from fint.system import SystemSpec

SPECS = Path(__file__).resolve().parent.parent / "specs"


def load(name: str) -> SystemSpec:
    with open(SPECS / f"{name}.json") as fh:
        return SystemSpec.from_json(json.load(fh))


def scipy_trajectory(spec, x0, ts):
    """Independent trajectory oracle (scipy RK45/DOP853); tests only."""
    from scipy.integrate import solve_ivp

    sol = solve_ivp(spec.rhs, (ts[0], ts[-1]), np.asarray(x0, float), method="DOP853",
                    t_eval=ts, rtol=1e-12, atol=1e-12)
    assert sol.success
    return sol.y.T


def oracle_drift(spec, F, x0, window=None, points=41):
    """Relative drift of F along a scipy trajectory."""
    lo, hi = spec.window if window is None else window
    ts = np.linspace(lo, hi, points)
    xs = scipy_trajectory(spec, x0, ts)
    v = F.evaluate_many(ts, xs)
    return float(np.max(np.abs(v - v[0])) / (1.0 + abs(v[0])))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
