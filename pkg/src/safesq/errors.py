"""Exception hierarchy shared by the engine and the CLI."""


class SafeSqError(Exception):
    """Base class for all errors raised by safesq."""


class DimensionOutOfRange(SafeSqError, ValueError):
    pass


class UniverseOverflow(SafeSqError, ValueError):
    pass


class CoordinateOutOfRange(SafeSqError, ValueError):
    pass


class WrongDimension(SafeSqError, ValueError):
    pass


class ArgumentOutOfRange(SafeSqError, ValueError):
    pass


class HypothesisViolated(SafeSqError, ValueError):
    pass


class NotCatalogued(SafeSqError, LookupError):
    pass


class BudgetExceeded(SafeSqError):
    """A computation would exceed a configured cell, pair or subset budget."""


class UniverseTooLarge(BudgetExceeded):
    pass


class EnumerationBudgetExceeded(BudgetExceeded):
    pass
