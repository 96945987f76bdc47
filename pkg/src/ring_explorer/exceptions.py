class RingExplorerError(Exception):
    pass


class ProtocolPreconditionViolation(RingExplorerError, ValueError):
    """The configuration or ring size is outside the protocol's domain."""


class ProtocolAmbiguity(RingExplorerError):
    """A guard that presupposes a unique robot matched several robots."""


class SchedulerError(RingExplorerError, ValueError):
    """An event was applied to a robot in the wrong status, or to an unknown robot."""


class ConfigFormatError(RingExplorerError, ValueError):
    pass


class BoundExceeded(RingExplorerError):
    """A state or depth limit was hit before the search could conclude."""
