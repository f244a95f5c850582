import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fint import _pykernels as P
from fint import kernels
from fint.errors import DomainError
from fint.numerics import _pack
from fint.scalar import parse_scalar

try:
    from fint import _ckernels as C
except ImportError:  # extension not built
    C = None

needs_c = pytest.mark.skipif(C is None, reason="compiled backend not built")

EXPRS = ["sin(t)*exp(-t)+t^3/(1+t^2)", "sqrt(1+t^2)*cosh(t)", "atan(t)-tanh(2*t)",
         "abs(t-0.3)^1.5", "ln(2+cos(t))", "-t^2+2^t", "tan(t/3)*sinh(t)"]


def test_pure_python_forced_by_environment():
    env = dict(os.environ, FINT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import fint; print(fint.BACKEND)"],
                         capture_output=True, text=True, env=env, check=True)
    assert out.stdout.strip() == "python"


@needs_c
def test_compiled_backend_selected_by_default():
    if os.environ.get("FINT_PURE_PYTHON") == "1":
        pytest.skip("fallback forced for this run")
    assert kernels.BACKEND == "cython"


@needs_c
@pytest.mark.parametrize("text", EXPRS)
def test_programs_agree(text):
    ops, consts = parse_scalar(text).compile()
    for t in np.linspace(-1.2, 1.2, 25):
        a = P.run_program(ops, consts, float(t))
        b = C.run_program(ops, consts, float(t))
        assert a == pytest.approx(b, rel=1e-15, abs=1e-300)


@needs_c
def test_domain_errors_agree():
    for text, t in [("ln(t)", -1.0), ("1/t", 0.0), ("sqrt(t)", -2.0)]:
        ops, consts = parse_scalar(text).compile()
        for impl in (P, C):
            with pytest.raises(DomainError):
                impl.run_program(ops, consts, t)


@needs_c
@pytest.mark.parametrize("text", EXPRS[:5])
def test_simpson_agrees(text):
    ops, consts = parse_scalar(text).compile()
    a = P.simpson_program(ops, consts, 0.0, 1.0, 1e-10)
    b = C.simpson_program(ops, consts, 0.0, 1.0, 1e-10)
    assert abs(a - b) <= 1e-12 * (1 + abs(a))
    f = parse_scalar(text)
    c = C.simpson_callable(f.evaluate, 0.0, 1.0, 1e-10)
    d = P.simpson_callable(f.evaluate, 0.0, 1.0, 1e-10)
    assert abs(c - d) <= 1e-12 * (1 + abs(c))


def _system(seed, n, m):
    rng = np.random.default_rng(seed)
    alphas = ["1", "sin(t)", "exp(-t)", "t^2"][:m]
    mats = rng.normal(size=(m, n, n)) * 0.5
    forcing = ["cos(3*t)"] + ["t"] * (n - 1)
    return alphas, mats, forcing


@needs_c
@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(1, 4), st.booleans())
def test_dopri_agrees(seed, n, m, forced):
    alphas, mats, forcing = _system(seed, n, m)
    aops, astart, aconsts = _pack([parse_scalar(a) for a in alphas])
    if forced:
        fops, fstart, fconsts = _pack([parse_scalar(f) for f in forcing])
    else:
        fops, fstart, fconsts = np.zeros(0, np.int32), np.zeros(0, np.int32), np.zeros(1)
    x0 = np.random.default_rng(seed + 1).normal(size=n)
    ts = np.linspace(0.0, 1.0, 21)
    xa, sa = P.dopri_linear(aops, astart, aconsts, mats, fops, fstart, fconsts, x0, ts, 1e-10, 1e-10)
    xb, sb = C.dopri_linear(aops, astart, aconsts, mats, fops, fstart, fconsts, x0, ts, 1e-10, 1e-10)
    assert sa[0] == sb[0] and sa[1] == sb[1]
    assert np.max(np.abs(xa - xb)) <= 1e-12 * (1 + np.abs(xa).max())


def test_pure_python_exponential():
    ops, start, consts = _pack([parse_scalar("1")])
    x, _ = P.dopri_linear(ops, start, consts, np.ones((1, 1, 1)), np.zeros(0, np.int32),
                          np.zeros(0, np.int32), np.zeros(1), np.array([1.0]),
                          np.linspace(0, 1, 11), 1e-10, 1e-10)
    assert x[-1, 0] == pytest.approx(math.e, abs=1e-8)
