"""Pure-Python reference implementation of the numeric kernels.

The compiled module ``fint._ckernels`` exposes the same functions with the
same signatures; ``fint.kernels`` picks one at import time.

Scalar programs are postfix bytecode: an int32 array of ``(opcode, arg)``
pairs plus a float64 constant pool.  ``arg`` is only used by ``OP_CONST``.
"""
import math

import numpy as np

from .errors import DomainError, QuadratureError, TrajectoryError

OP_CONST = 0
OP_T = 1
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_POW = 6
OP_NEG = 7
OP_SIN = 10
OP_COS = 11
OP_TAN = 12
OP_EXP = 13
OP_LN = 14
OP_SINH = 15
OP_COSH = 16
OP_TANH = 17
OP_ATAN = 18
OP_SQRT = 19
OP_ABS = 20

TAN_POLE_EPS = 1e-12
MAX_DEPTH = 40
MIN_DEPTH = 2

BACKEND = "python"


def _pow(a, b):
    if a == 0.0 and b < 0.0:
        raise DomainError("zero raised to a negative power")
    if a < 0.0 and b != math.floor(b):
        raise DomainError("negative base with non-integer exponent")
    try:
        return math.pow(a, b)
    except OverflowError:
        raise DomainError("overflow in power") from None


def _call(code, x):
    try:
        if code == OP_SIN:
            return math.sin(x)
        if code == OP_COS:
            return math.cos(x)
        if code == OP_TAN:
            if abs(math.cos(x)) < TAN_POLE_EPS:
                raise DomainError("tan evaluated at a pole")
            return math.tan(x)
        if code == OP_EXP:
            return math.exp(x)
        if code == OP_LN:
            if x <= 0.0:
                raise DomainError("ln of a non-positive number")
            return math.log(x)
        if code == OP_SINH:
            return math.sinh(x)
        if code == OP_COSH:
            return math.cosh(x)
        if code == OP_TANH:
            return math.tanh(x)
        if code == OP_ATAN:
            return math.atan(x)
        if code == OP_SQRT:
            if x < 0.0:
                raise DomainError("sqrt of a negative number")
            return math.sqrt(x)
        if code == OP_ABS:
            return abs(x)
    except OverflowError:
        raise DomainError("overflow in function call") from None
    raise ValueError(f"bad opcode {code}")


def run_program(ops, consts, t, start=0, stop=None):
    """Evaluate the postfix program ``ops[start:stop]`` at time ``t``."""
    if stop is None:
        stop = len(ops)
    stack = []
    push = stack.append
    pop = stack.pop
    for i in range(start, stop, 2):
        code = ops[i]
        if code == OP_CONST:
            push(consts[ops[i + 1]])
        elif code == OP_T:
            push(t)
        elif code == OP_NEG:
            stack[-1] = -stack[-1]
        elif code < OP_SIN:
            b = pop()
            a = pop()
            if code == OP_ADD:
                r = a + b
            elif code == OP_SUB:
                r = a - b
            elif code == OP_MUL:
                r = a * b
            elif code == OP_DIV:
                if b == 0.0:
                    raise DomainError("division by zero")
                r = a / b
            else:
                r = _pow(a, b)
            push(r)
        else:
            stack[-1] = _call(code, stack[-1])
        if not math.isfinite(stack[-1]):
            raise DomainError("non-finite intermediate value")
    return stack[-1]


def _simpson(f, a, b, tol):
    if a == b:
        return 0.0
    fa = f(a)
    fb = f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    # relative part of the tolerance is fixed from a coarse global estimate
    eps = max(tol, tol * abs(whole))
    return _asr(f, a, b, fa, fm, fb, whole, eps, 0)


def _asr(f, a, b, fa, fm, fb, whole, eps, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth >= MIN_DEPTH and abs(delta) <= 15.0 * eps:
        return left + right + delta / 15.0
    if depth >= MAX_DEPTH:
        raise QuadratureError(f"adaptive Simpson did not converge after depth {MAX_DEPTH}")
    return (_asr(f, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1)
            + _asr(f, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1))


def simpson_program(ops, consts, a, b, tol):
    """Adaptive Simpson integral of a bytecode program over [a, b]."""
    return _simpson(lambda t: run_program(ops, consts, t), a, b, tol)


def simpson_callable(f, a, b, tol):
    """Adaptive Simpson integral of a Python callable over [a, b]."""
    def g(t):
        v = f(t)
        if not math.isfinite(v):
            raise DomainError("integrand is not finite")
        return v
    return _simpson(g, a, b, tol)


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def dopri_linear(alpha_ops, alpha_start, alpha_consts, mats, f_ops, f_start, f_consts,
                 x0, t_samples, rtol, atol, max_steps=200000):
    """Integrate x' = sum_j alpha_j(t) A_j x + f(t) with Dormand-Prince 5(4).

    Args:
        alpha_ops, alpha_start, alpha_consts: packed coefficient programs;
            program j occupies ``alpha_ops[alpha_start[j]:alpha_start[j+1]]``.
        mats: float array of shape (m, n, n).
        f_ops, f_start, f_consts: packed forcing programs (n of them), or an
            empty ``f_start`` for a homogeneous system.
        x0: initial state at ``t_samples[0]``.
        t_samples: strictly increasing output times; steps land on each.

    Returns:
        (states, stats) with states of shape (len(t_samples), n) and stats a
        tuple (accepted steps, rejected steps, max accepted error norm).
    """
    mats = np.asarray(mats, dtype=float)
    m, n = mats.shape[0], mats.shape[1]
    nf = len(f_start) - 1 if len(f_start) else 0
    ts = np.asarray(t_samples, dtype=float)

    def rhs(t, x):
        acc = np.zeros(n)
        for j in range(m):
            a = run_program(alpha_ops, alpha_consts, t, alpha_start[j], alpha_start[j + 1])
            acc += a * (mats[j] @ x)
        for i in range(nf):
            acc[i] += run_program(f_ops, f_consts, t, f_start[i], f_start[i + 1])
        return acc

    out = np.empty((len(ts), n))
    x = np.array(x0, dtype=float)
    out[0] = x
    t = ts[0]
    span = ts[-1] - ts[0]
    h = min(span / 100.0, ts[1] - ts[0]) if len(ts) > 1 else 0.0
    k1 = rhs(t, x)
    steps = rejected = 0
    max_err = 0.0
    idx = 1
    while idx < len(ts):
        target = ts[idx]
        h_try = min(h, target - t)
        hit = h_try >= target - t
        shortened = h_try < h
        if h_try <= 1e-14 * max(1.0, abs(t)):
            raise TrajectoryError(f"step size collapsed at t={t:.6g}")
        ks = [k1]
        for s in range(1, 7):
            xs = x.copy()
            for r, a in enumerate(_A[s]):
                if a != 0.0:
                    xs += h_try * a * ks[r]
            ks.append(rhs(t + _C[s] * h_try, xs))
        x_new = x + h_try * sum(b * k for b, k in zip(_B, ks) if b != 0.0)
        err_vec = h_try * sum(e * k for e, k in zip(_E, ks) if e != 0.0)
        scale = atol + rtol * np.maximum(np.abs(x), np.abs(x_new))
        err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))
        if not np.all(np.isfinite(x_new)) or not math.isfinite(err):
            raise TrajectoryError(f"non-finite state near t={t:.6g}")
        if err <= 1.0:
            steps += 1
            max_err = max(max_err, err)
            t = target if hit else t + h_try
            x = x_new
            k1 = ks[6]
            if hit:
                out[idx] = x
                idx += 1
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            # a step shortened to land on a sample does not shrink h
            h = max(h, h_try * fac) if shortened else h_try * fac
        else:
            rejected += 1
            h = h_try * max(0.2, 0.9 * err ** -0.2)
        if steps + rejected > max_steps:
            raise TrajectoryError("maximum number of steps exceeded")
    return out, (steps, rejected, max_err)
