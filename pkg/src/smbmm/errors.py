"""Exception types shared across the package."""


class ProtocolError(Exception):
    """Base class for every error raised by this package."""


class ShapeError(ProtocolError):
    """Operands have incompatible dimensions or live in different fields."""


class DivisionByZero(ProtocolError, ZeroDivisionError):
    """Inverse of zero requested."""


class SingularMatrix(ProtocolError):
    """Square system has no unique solution."""


class DegeneratePoints(ProtocolError):
    """Evaluation points repeat, or a pole coincides with a point."""


class PartitionError(ProtocolError):
    """Matrix dimensions are not divisible by the requested grid."""


class IncompleteError(ProtocolError):
    """A block needed for reassembly is missing."""


class FieldTooSmall(ProtocolError):
    """The field cannot host the required number of distinct points."""


class NotDivisible(ProtocolError):
    """Matrix dimensions do not admit the requested partitioning."""


class InsufficientServers(ProtocolError):
    """Fewer servers than the recovery threshold."""


class NotEnoughAnswers(ProtocolError):
    """Fewer responsive answers than decoding requires."""


class MissingServer(ProtocolError):
    """A scheme without straggler tolerance is missing a participant."""


class UnsupportedPartition(ProtocolError):
    """The scheme only supports inner-dimension partitioning."""


class RankError(ProtocolError):
    """A matrix does not have the rank the construction requires."""


class ConsistencyError(ProtocolError):
    """A build-time self-check of hardcoded constants failed."""


class InternalError(ProtocolError):
    """An invariant that valid inputs guarantee was violated."""


class IncompleteTrace(ProtocolError):
    """A trace lacks the records needed to measure costs."""


class ConfigError(ProtocolError):
    """A simulation config is malformed or inconsistent."""
