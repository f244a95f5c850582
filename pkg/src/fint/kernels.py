"""Backend selection for the numeric kernels.

The compiled extension is used when it imports cleanly; otherwise the
pure-Python reference is used.  Setting ``FINT_PURE_PYTHON=1`` forces the
fallback (handy for debugging and for the backend-equivalence tests).
"""
import os

from . import _pykernels

_impl = _pykernels
if os.environ.get("FINT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
run_program = _impl.run_program
simpson_program = _impl.simpson_program
simpson_callable = _impl.simpson_callable
dopri_linear = _impl.dopri_linear

# opcodes are shared by both backends
from ._pykernels import (  # noqa: E402
    OP_ABS, OP_ADD, OP_ATAN, OP_CONST, OP_COS, OP_COSH, OP_DIV, OP_EXP, OP_LN, OP_MUL,
    OP_NEG, OP_POW, OP_SIN, OP_SINH, OP_SQRT, OP_SUB, OP_T, OP_TAN, OP_TANH,
)

__all__ = [
    "BACKEND", "run_program", "simpson_program", "simpson_callable", "dopri_linear",
    "OP_ABS", "OP_ADD", "OP_ATAN", "OP_CONST", "OP_COS", "OP_COSH", "OP_DIV", "OP_EXP",
    "OP_LN", "OP_MUL", "OP_NEG", "OP_POW", "OP_SIN", "OP_SINH", "OP_SQRT", "OP_SUB",
    "OP_T", "OP_TAN", "OP_TANH",
]
