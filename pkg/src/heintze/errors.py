"""Exception types raised across the package."""


class SpecError(ValueError):
    """Invalid Jordan data (non-positive eigenvalue, bad block size, ...)."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class PrecisionError(ArithmeticError):
    """A numerical cut-off is too shallow for the requested quantity."""


class ContractViolation(AssertionError):
    """An observed value falls outside a declared band.

    The offending pair is kept on the exception so callers can report it.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
