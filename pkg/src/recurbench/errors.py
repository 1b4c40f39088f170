"""Exception hierarchy shared by every module."""


class WorkbenchError(Exception):
    pass


class BudgetError(WorkbenchError):
    """A finite budget (depth, sequence length, radius) is too small for the query."""


class ResourceError(WorkbenchError):
    """An enumeration would exceed its configured size cap."""


class RelationError(ValueError):
    """A permutation assignment violates a defining relation of the group."""

    def __init__(self, message, relator=None):
        super().__init__(message)
        self.relator = relator


class HypothesisError(WorkbenchError):
    """A construction was refused because its hypothesis is not certified."""


class EquivalenceViolation(WorkbenchError):
    """Two conditions that must agree were certified with opposite outcomes."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
