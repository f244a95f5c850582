# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numeric kernels (bytecode evaluation, adaptive Simpson, DOPRI5).

Signatures and semantics match ``fint._pykernels`` exactly.
"""
from libc.math cimport sin, cos, tan, exp, log, sinh, cosh, tanh, atan, sqrt, fabs, pow, floor, isfinite
from libc.stdlib cimport malloc, free

import numpy as np
cimport numpy as cnp

from .errors import DomainError, QuadratureError, TrajectoryError

cnp.import_array()

BACKEND = "cython"

cdef enum:
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

cdef double TAN_POLE_EPS = 1e-12
cdef int MAX_DEPTH = 40
cdef int MIN_DEPTH = 2

_MESSAGES = {
    1: "division by zero",
    2: "zero raised to a negative power",
    3: "negative base with non-integer exponent",
    4: "tan evaluated at a pole",
    5: "ln of a non-positive number",
    6: "sqrt of a negative number",
    7: "non-finite intermediate value",
    8: "bad opcode",
}


cdef inline int _run(const int* ops, const double* consts, Py_ssize_t start, Py_ssize_t stop,
                     double t, double* stack, double* out) noexcept nogil:
    cdef Py_ssize_t i
    cdef int sp = -1
    cdef int code
    cdef double a, b, r
    i = start
    while i < stop:
        code = ops[i]
        if code == OP_CONST:
            sp += 1
            stack[sp] = consts[ops[i + 1]]
        elif code == OP_T:
            sp += 1
            stack[sp] = t
        elif code == OP_NEG:
            stack[sp] = -stack[sp]
        elif code < OP_SIN:
            b = stack[sp]
            sp -= 1
            a = stack[sp]
            if code == OP_ADD:
                r = a + b
            elif code == OP_SUB:
                r = a - b
            elif code == OP_MUL:
                r = a * b
            elif code == OP_DIV:
                if b == 0.0:
                    return 1
                r = a / b
            elif code == OP_POW:
                if a == 0.0 and b < 0.0:
                    return 2
                if a < 0.0 and b != floor(b):
                    return 3
                r = pow(a, b)
            else:
                return 8
            stack[sp] = r
        else:
            a = stack[sp]
            if code == OP_SIN:
                r = sin(a)
            elif code == OP_COS:
                r = cos(a)
            elif code == OP_TAN:
                if fabs(cos(a)) < TAN_POLE_EPS:
                    return 4
                r = tan(a)
            elif code == OP_EXP:
                r = exp(a)
            elif code == OP_LN:
                if a <= 0.0:
                    return 5
                r = log(a)
            elif code == OP_SINH:
                r = sinh(a)
            elif code == OP_COSH:
                r = cosh(a)
            elif code == OP_TANH:
                r = tanh(a)
            elif code == OP_ATAN:
                r = atan(a)
            elif code == OP_SQRT:
                if a < 0.0:
                    return 6
                r = sqrt(a)
            elif code == OP_ABS:
                r = fabs(a)
            else:
                return 8
            stack[sp] = r
        if not isfinite(stack[sp]):
            return 7
        i += 2
    out[0] = stack[sp]
    return 0


cdef inline void _raise(int status) except *:
    raise DomainError(_MESSAGES.get(status, "evaluation error"))


def run_program(ops, consts, double t, Py_ssize_t start=0, stop=None):
    """Evaluate the postfix program ``ops[start:stop]`` at time ``t``."""
    cdef int[::1] o = np.ascontiguousarray(ops, dtype=np.int32)
    cdef double[::1] c = np.ascontiguousarray(consts, dtype=np.float64)
    cdef Py_ssize_t hi = o.shape[0] if stop is None else stop
    cdef double val = 0.0
    cdef int status
    cdef double* stack = <double*> malloc(sizeof(double) * (hi - start + 2))
    cdef double dummy = 0.0
    cdef const double* cp = &c[0] if c.shape[0] > 0 else &dummy
    try:
        status = _run(&o[0], cp, start, hi, t, stack, &val)
    finally:
        free(stack)
    if status:
        _raise(status)
    return val


cdef struct _Prog:
    const int* ops
    const double* consts
    Py_ssize_t start
    Py_ssize_t stop
    double* stack


cdef int _asr_prog(_Prog* p, double a, double b, double fa, double fm, double fb,
                   double whole, double eps, int depth, double* out) noexcept nogil:
    cdef double m = 0.5 * (a + b)
    cdef double lm = 0.5 * (a + m)
    cdef double rm = 0.5 * (m + b)
    cdef double flm, frm, left, right, delta, r1, r2
    cdef int st
    st = _run(p.ops, p.consts, p.start, p.stop, lm, p.stack, &flm)
    if st:
        return st
    st = _run(p.ops, p.consts, p.start, p.stop, rm, p.stack, &frm)
    if st:
        return st
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth >= MIN_DEPTH and fabs(delta) <= 15.0 * eps:
        out[0] = left + right + delta / 15.0
        return 0
    if depth >= MAX_DEPTH:
        return -1
    st = _asr_prog(p, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1, &r1)
    if st:
        return st
    st = _asr_prog(p, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1, &r2)
    if st:
        return st
    out[0] = r1 + r2
    return 0


def simpson_program(ops, consts, double a, double b, double tol):
    """Adaptive Simpson integral of a bytecode program over [a, b]."""
    if a == b:
        return 0.0
    cdef int[::1] o = np.ascontiguousarray(ops, dtype=np.int32)
    cdef double[::1] c = np.ascontiguousarray(consts, dtype=np.float64)
    cdef double dummy = 0.0
    cdef _Prog p
    cdef double fa, fb, fm, whole, eps, result = 0.0
    cdef int st
    p.ops = &o[0]
    p.consts = &c[0] if c.shape[0] > 0 else &dummy
    p.start = 0
    p.stop = o.shape[0]
    p.stack = <double*> malloc(sizeof(double) * (o.shape[0] + 2))
    try:
        with nogil:
            st = _run(p.ops, p.consts, p.start, p.stop, a, p.stack, &fa)
            if not st:
                st = _run(p.ops, p.consts, p.start, p.stop, b, p.stack, &fb)
            if not st:
                st = _run(p.ops, p.consts, p.start, p.stop, 0.5 * (a + b), p.stack, &fm)
            if not st:
                whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
                eps = tol * fabs(whole)
                if eps < tol:
                    eps = tol
                st = _asr_prog(&p, a, b, fa, fm, fb, whole, eps, 0, &result)
    finally:
        free(p.stack)
    if st == -1:
        raise QuadratureError("adaptive Simpson did not converge after depth 40")
    if st:
        _raise(st)
    return result


cdef double _call_checked(object f, double t) except? -1e308:
    cdef double v = f(t)
    if not isfinite(v):
        raise DomainError("integrand is not finite")
    return v


cdef double _asr_call(object f, double a, double b, double fa, double fm, double fb,
                      double whole, double eps, int depth) except? -1e308:
    cdef double m = 0.5 * (a + b)
    cdef double lm = 0.5 * (a + m)
    cdef double rm = 0.5 * (m + b)
    cdef double flm = _call_checked(f, lm)
    cdef double frm = _call_checked(f, rm)
    cdef double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    cdef double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    cdef double delta = left + right - whole
    if depth >= MIN_DEPTH and fabs(delta) <= 15.0 * eps:
        return left + right + delta / 15.0
    if depth >= MAX_DEPTH:
        raise QuadratureError("adaptive Simpson did not converge after depth 40")
    return (_asr_call(f, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1)
            + _asr_call(f, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1))


def simpson_callable(f, double a, double b, double tol):
    """Adaptive Simpson integral of a Python callable over [a, b]."""
    if a == b:
        return 0.0
    cdef double fa = _call_checked(f, a)
    cdef double fb = _call_checked(f, b)
    cdef double fm = _call_checked(f, 0.5 * (a + b))
    cdef double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    cdef double eps = tol * fabs(whole)
    if eps < tol:
        eps = tol
    return _asr_call(f, a, b, fa, fm, fb, whole, eps, 0)


cdef double[7] _C = [0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0]
cdef double[7][6] _A = [
    [0, 0, 0, 0, 0, 0],
    [1.0 / 5, 0, 0, 0, 0, 0],
    [3.0 / 40, 9.0 / 40, 0, 0, 0, 0],
    [44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0],
    [19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0],
    [9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0],
    [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84],
]
cdef double[7] _B = [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0]
cdef double[7] _E = [71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200,
                     22.0 / 525, -1.0 / 40]


cdef struct _Sys:
    int m
    int n
    int nf
    const int* aops
    const int* astart
    const double* aconsts
    const double* mats
    const int* fops
    const int* fstart
    const double* fconsts
    double* stack
    double* alpha


cdef int _rhs(_Sys* s, double t, const double* x, double* out) noexcept nogil:
    cdef int j, i, k, st
    cdef double acc, fv
    cdef int n = s.n
    for j in range(s.m):
        st = _run(s.aops, s.aconsts, s.astart[j], s.astart[j + 1], t, s.stack, &s.alpha[j])
        if st:
            return st
    for i in range(n):
        acc = 0.0
        for j in range(s.m):
            if s.alpha[j] == 0.0:
                continue
            fv = 0.0
            for k in range(n):
                fv += s.mats[(j * n + i) * n + k] * x[k]
            acc += s.alpha[j] * fv
        out[i] = acc
    for i in range(s.nf):
        st = _run(s.fops, s.fconsts, s.fstart[i], s.fstart[i + 1], t, s.stack, &fv)
        if st:
            return st
        out[i] += fv
    return 0


def dopri_linear(alpha_ops, alpha_start, alpha_consts, mats, f_ops, f_start, f_consts,
                 x0, t_samples, double rtol, double atol, long max_steps=200000):
    """Integrate x' = sum_j alpha_j(t) A_j x + f(t) with Dormand-Prince 5(4)."""
    cdef double[:, :, ::1] M = np.ascontiguousarray(mats, dtype=np.float64)
    cdef int m = M.shape[0]
    cdef int n = M.shape[1]
    cdef int[::1] aops = np.ascontiguousarray(np.append(alpha_ops, [0, 0]), dtype=np.int32)
    cdef int[::1] astart = np.ascontiguousarray(np.append(alpha_start, [0]), dtype=np.int32)
    cdef double[::1] aconsts = np.ascontiguousarray(np.append(alpha_consts, [0.0]), dtype=np.float64)
    cdef int nf = len(f_start) - 1 if len(f_start) else 0
    cdef int[::1] fops = np.ascontiguousarray(np.append(f_ops, [0, 0]), dtype=np.int32)
    cdef int[::1] fstart = np.ascontiguousarray(np.append(f_start, [0]), dtype=np.int32)
    cdef double[::1] fconsts = np.ascontiguousarray(np.append(f_consts, [0.0]), dtype=np.float64)
    cdef double[::1] ts = np.ascontiguousarray(t_samples, dtype=np.float64)
    cdef Py_ssize_t ns = ts.shape[0]
    out_arr = np.empty((ns, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t stack_len = max(aops.shape[0], fops.shape[0]) + 2

    cdef _Sys s
    s.m = m
    s.n = n
    s.nf = nf
    s.aops = &aops[0]
    s.astart = &astart[0]
    s.aconsts = &aconsts[0]
    s.mats = &M[0, 0, 0]
    s.fops = &fops[0]
    s.fstart = &fstart[0]
    s.fconsts = &fconsts[0]
    s.stack = <double*> malloc(sizeof(double) * stack_len)
    s.alpha = <double*> malloc(sizeof(double) * (m + 1))
    cdef double* work = <double*> malloc(sizeof(double) * n * 11)
    cdef double* x = work
    cdef double* xs = work + n
    cdef double* xnew = work + 2 * n
    cdef double* k = work + 3 * n  # 7 stages, n each, then FSAL copy
    cdef int i, st = 0, stg, r
    cdef Py_ssize_t idx = 1
    cdef double t, h, h_try, target, err, sc, ev, fac, max_err = 0.0, a_x, a_xn
    cdef long steps = 0, rejected = 0
    cdef bint hit, shortened
    cdef int code = 0  # 0 ok, 1 collapse, 2 nonfinite, 3 too many steps, other: domain status
    try:
        for i in range(n):
            x[i] = x0[i]
            out[0, i] = x[i]
        t = ts[0]
        h = 0.0
        if ns > 1:
            h = (ts[ns - 1] - ts[0]) / 100.0
            if ts[1] - ts[0] < h:
                h = ts[1] - ts[0]
        with nogil:
            st = _rhs(&s, t, x, k)
            if st:
                code = 100 + st
            while code == 0 and idx < ns:
                target = ts[idx]
                h_try = h if h < target - t else target - t
                hit = h_try >= target - t
                shortened = h_try < h
                if h_try <= 1e-14 * (fabs(t) if fabs(t) > 1.0 else 1.0):
                    code = 1
                    break
                for stg in range(1, 7):
                    for i in range(n):
                        ev = x[i]
                        for r in range(stg):
                            if _A[stg][r] != 0.0:
                                ev += h_try * _A[stg][r] * k[r * n + i]
                        xs[i] = ev
                    st = _rhs(&s, t + _C[stg] * h_try, xs, k + stg * n)
                    if st:
                        code = 100 + st
                        break
                if code:
                    break
                err = 0.0
                for i in range(n):
                    ev = 0.0
                    sc = 0.0
                    for r in range(7):
                        if _B[r] != 0.0:
                            ev += _B[r] * k[r * n + i]
                        if _E[r] != 0.0:
                            sc += _E[r] * k[r * n + i]
                    xnew[i] = x[i] + h_try * ev
                    a_x = fabs(x[i])
                    a_xn = fabs(xnew[i])
                    ev = h_try * sc / (atol + rtol * (a_x if a_x > a_xn else a_xn))
                    err += ev * ev
                    if not isfinite(xnew[i]):
                        code = 2
                if code:
                    break
                err = sqrt(err / n)
                if not isfinite(err):
                    code = 2
                    break
                if err <= 1.0:
                    steps += 1
                    if err > max_err:
                        max_err = err
                    t = target if hit else t + h_try
                    for i in range(n):
                        x[i] = xnew[i]
                        k[i] = k[6 * n + i]
                    if hit:
                        for i in range(n):
                            out[idx, i] = x[i]
                        idx += 1
                    if err == 0.0:
                        fac = 5.0
                    else:
                        fac = 0.9 * pow(err, -0.2)
                        if fac > 5.0:
                            fac = 5.0
                        if fac < 0.2:
                            fac = 0.2
                    if shortened:
                        if h_try * fac > h:
                            h = h_try * fac
                    else:
                        h = h_try * fac
                else:
                    rejected += 1
                    fac = 0.9 * pow(err, -0.2)
                    if fac < 0.2:
                        fac = 0.2
                    h = h_try * fac
                if steps + rejected > max_steps:
                    code = 3
    finally:
        free(work)
        free(s.stack)
        free(s.alpha)
    if code == 1:
        raise TrajectoryError(f"step size collapsed at t={t:.6g}")
    if code == 2:
        raise TrajectoryError(f"non-finite state near t={t:.6g}")
    if code == 3:
        raise TrajectoryError("maximum number of steps exceeded")
    if code > 100:
        _raise(code - 100)
    return out_arr, (steps, rejected, max_err)
