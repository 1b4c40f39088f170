"""Executable recurrence theory for group actions on zero-dimensional spaces."""
from __future__ import annotations

from .errors import (BudgetError, EquivalenceViolation, HypothesisError, RelationError, ResourceError,
                     WorkbenchError)
from .verdict import Outcome, Verdict

__version__ = "0.1.0"

__all__ = [
    "BudgetError", "EquivalenceViolation", "HypothesisError", "Outcome", "RelationError", "ResourceError",
    "Verdict", "WorkbenchError", "__version__",
]
