"""Exception hierarchy shared by all ergokit modules."""


class ErgokitError(Exception):
    """Base class for all toolkit errors."""


class NonSquareError(ErgokitError):
    pass


class NegativeEntryError(ErgokitError):
    pass


class RowSumError(ErgokitError):
    """A row sum deviates from 1 beyond the ingestion tolerance."""


class SpaceMismatchError(ErgokitError):
    """Two values refer to different state spaces."""


class NotStationaryError(ErgokitError):
    """A distribution claimed stationary fails the residual check."""


class NotIrreducibleError(ErgokitError):
    pass


class NotErgodicError(ErgokitError):
    """Irreducibility or aperiodicity fails where both are required."""


class NotPositiveError(ErgokitError):
    """The matrix has a zero entry where strict positivity is required."""


class NoClosedWalkError(ErgokitError):
    """The state lies on no closed walk; its period is undefined."""


class MonotonicityViolationError(ErgokitError):
    """Envelope sequences lost monotonicity; signals a numerical fault."""


class MaxIterExceededError(ErgokitError):
    pass


class NoConvergenceError(ErgokitError):
    pass


class TooLargeError(ErgokitError):
    """State space exceeds the cap of an exhaustive routine."""


class BalanceViolationError(ErgokitError):
    """Tree weights fail the flow-balance identity; internal inconsistency."""


class SingularSystemError(ErgokitError):
    pass


class RankDeficientError(ErgokitError):
    """Nullity of P - I exceeds 1; contradicts irreducibility numerically."""


class NeverMetError(ErgokitError):
    """The two paths never satisfy the meeting condition."""


class InvalidGeneratorParamsError(ErgokitError):
    pass


class ChainParseError(ErgokitError):
    """A chain file could not be parsed."""
