"""Exception hierarchy shared by all fockstat modules."""


class FockStatError(Exception):
    """Base class for every error raised by fockstat."""


class InvalidArgumentError(FockStatError, ValueError):
    """An argument violates an operation's precondition."""


class DimensionMismatchError(FockStatError, ValueError):
    """Operands disagree on the number of modes or matrix shape."""


class TotalMismatchError(FockStatError, ValueError):
    """Occupation vectors carry different particle numbers."""


class PauliExclusionError(InvalidArgumentError):
    """A fermionic state would put two particles into one mode."""


class NumericalContractError(FockStatError, ArithmeticError):
    """A numerical invariant (unitarity, normalization, ...) is violated."""


class NonUnitaryError(NumericalContractError):
    pass


class NonUniqueSteadyStateError(NumericalContractError):
    """The eigenvalue-1 eigenspace of a map has dimension greater than one."""

    def __init__(self, message: str, multiplicity: int):
        super().__init__(message)
        self.multiplicity = multiplicity


class UndefinedRatioError(NumericalContractError):
    """A ratio was requested whose denominator is zero."""


class IncompletePartitionError(InvalidArgumentError):
    """A coarse graining does not partition the requested basis."""
