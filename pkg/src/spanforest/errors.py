"""Exception hierarchy shared by all spanforest modules."""


class SpanforestError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SpanforestError):
    """Bad argument or malformed input (CLI exit status 2)."""


class CapacityError(SpanforestError):
    """A configured size limit would be exceeded (CLI exit status 3)."""


class DisconnectedGraphError(ValidationError):
    """Operation requires a connected graph."""
