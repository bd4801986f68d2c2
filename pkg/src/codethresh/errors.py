"""Exception types shared across the package.

Three failure categories matter to callers (and map to distinct CLI exit
codes): malformed inputs, mathematically out-of-domain inputs, and
computations whose combinatorial cost would exceed a configured budget.
"""


class ValidationError(ValueError):
    """Input is structurally invalid (wrong shape, bad range, inconsistent)."""


class DomainError(ValidationError):
    """Input is outside the mathematical domain of the requested quantity."""


class BudgetError(RuntimeError):
    """The computation would exceed a configured size or work budget."""
