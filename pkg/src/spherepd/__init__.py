"""Isotropic positive definite functions on spheres.

Schoenberg sequences, the montee and descente operators, turning bands, and the
moment-sum asymptotics behind the differentiability results.
"""

__version__ = "0.1.0"

from .exceptions import (ConvergenceError, DerivativeUnavailableError, DimensionError,
                         DivergenceError, DomainError, ParityError, QuadratureError,
                         SpherePDError)
from .model import IsotropicFunction, RadialFunction
from .schoenberg import INF, SchoenbergSequence, analyze, synthesize, to_one_dim
from .operators import (OperatorReport, descente_numeric, descente_sequence, montee_numeric,
                        montee_sequence, optimality_witness)
from .validation import PDCheckReport, differentiability_probe, pd_check

__all__ = [
    "ConvergenceError", "DerivativeUnavailableError", "DimensionError", "DivergenceError",
    "DomainError", "INF", "IsotropicFunction", "OperatorReport", "PDCheckReport",
    "ParityError", "QuadratureError", "RadialFunction", "SchoenbergSequence", "SpherePDError",
    "analyze", "descente_numeric", "descente_sequence", "differentiability_probe",
    "montee_numeric", "montee_sequence", "optimality_witness", "pd_check", "synthesize",
    "to_one_dim",
]
