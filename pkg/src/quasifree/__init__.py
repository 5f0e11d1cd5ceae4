"""Determinantal point processes on discrete lattices and fermion quasifree states."""
from ._accel import BACKEND
from .errors import (ConstructionError, DomainError, EvaluationError, QuasifreeError,
                     RegularityError, ResourceError)
from .policy import DEFAULT_POLICY, Policy

__version__ = "0.1.0"
__all__ = ["BACKEND", "DEFAULT_POLICY", "Policy", "QuasifreeError", "DomainError",
           "ConstructionError", "RegularityError", "EvaluationError", "ResourceError"]
