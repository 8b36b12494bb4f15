"""Exception types shared across the package."""


class SchedulingError(Exception):
    """Base class for every error raised by this package."""


class UnknownHost(SchedulingError):
    pass


class UnknownInstance(SchedulingError):
    pass


class DuplicateInstance(SchedulingError):
    pass


class CapacityExceeded(SchedulingError):
    """Committing an instance would drive a host's full-state free resources negative."""


class NoFeasibleVictims(SchedulingError):
    """No preemptible subset can free enough room; the caller violated the
    guarantee that the host's normal-only view fits the request."""


class ScenarioError(SchedulingError):
    """Malformed scenario document; the message names the offending field."""
