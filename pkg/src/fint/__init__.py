"""First integrals of linear ODE systems."""
from .api import analyze, classify, construct_basis, inject_perturbation, load_spec, verify
from .errors import (ClassificationError, ConstructionError, DomainError, FintError, ParseError,
                     QuadratureError, SpecError, SpectralError, TrajectoryError,
                     VerificationError)
from .expr import EvalPoint, IntegralExpr, eval_integral, format_integral, numeric_partial
from .kernels import BACKEND
from .numerics import VerificationReport, verify_integrals
from .result import BasisResult
from .scalar import ScalarExpr, eval_scalar, parse_scalar
from .spectral import SpectralData, spectrum_of_transpose
from .system import SystemSpec, constant_system

__all__ = [
    "analyze", "classify", "construct_basis", "inject_perturbation", "load_spec", "verify",
    "ClassificationError", "ConstructionError", "DomainError", "FintError", "ParseError",
    "QuadratureError", "SpecError", "SpectralError", "TrajectoryError", "VerificationError",
    "EvalPoint", "IntegralExpr", "eval_integral", "format_integral", "numeric_partial",
    "BACKEND", "VerificationReport", "verify_integrals", "BasisResult", "ScalarExpr",
    "eval_scalar", "parse_scalar", "SpectralData", "spectrum_of_transpose", "SystemSpec",
    "constant_system",
]
