from typing import Optional


class KLRError(Exception):
    """Base class for every error raised by the library."""

    exit_code = 1


# INPUT ERRORS (exit code 2)


class CorpusError(KLRError):
    exit_code = 2

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UnknownModuleError(KLRError):
    exit_code = 2

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown module {name!r}")


class DimensionMismatchError(KLRError):
    exit_code = 2


class HeightMismatchError(KLRError):
    exit_code = 2


class RootMismatchError(KLRError):
    exit_code = 2


# MATHEMATICAL PRECONDITIONS AND FAILURES (exit code 1)


class SymmetryError(KLRError):
    """Q_ij is not a polynomial in u - v on the support of a root."""


class NotInvariantError(KLRError):
    pass


class NotSimpleError(KLRError):
    pass


class PreconditionError(KLRError):
    # Reasons understood by the verify command.
    M_NOT_SIMPLE = "m not simple"
    R_NOT_SCALAR = "r_{m,m} not scalar"
    N_NOT_SIMPLE = "n not simple"
    M_IS_ZERO = "m is zero"

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class SandwichPreconditionError(KLRError):
    pass


class ZeroMapError(KLRError):
    pass


class ConsistencyError(KLRError):
    """Two independent computations of the same quantity disagree."""
