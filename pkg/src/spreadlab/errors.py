"""Error taxonomy shared across the package.

Domain errors are precondition violations a caller can repair (bad parameters,
singular input, objects over mismatched fields).  Budget errors mean a search or
table build would exceed the configured resource cap and was refused up front.
"""


class SpreadLabError(Exception):
    pass


class DomainError(SpreadLabError, ValueError):
    """Input outside an operation's documented domain."""


class SingularMatrixError(DomainError):
    """Matrix inversion requested for a singular matrix.

    Carries a nonzero row vector of the left kernel as ``witness``.
    """

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class BudgetExceededError(SpreadLabError):
    """A search or table would exceed the configured budget; nothing was computed."""
