"""Exception hierarchy shared by the toolkit."""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class BudgetExceeded(ToolkitError):
    """A configured resource budget (precision, size, factorization) was hit."""


class PrecisionCapExceeded(BudgetExceeded):
    """Interval evaluation could not be resolved below the precision cap."""


class SizeGuardExceeded(BudgetExceeded):
    """A brute-force enumeration would exceed its configured size guard."""


class FactorizationFailed(BudgetExceeded):
    """A value could not be factored within the trial/rho budget."""


class UnboundedBelow(ToolkitError, ValueError):
    """An optimization problem has infimum minus infinity."""
