"""Exception hierarchy shared by all kvh modules."""


class KvhError(Exception):
    """Base class for every error raised by kvh."""


class EnergyBelowWell(KvhError):
    pass


class EnergyAboveWell(KvhError):
    pass


class StepFailure(KvhError):
    def __init__(self, message, last_time=None):
        super().__init__(message)
        self.last_time = last_time


class ActionOutOfRange(KvhError):
    pass


class OutsideAllowedRegion(KvhError):
    pass


class InsideAllowedRegion(KvhError):
    pass


class RegionMismatch(KvhError):
    pass


class OutOfDomain(KvhError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class CausticUnresolved(KvhError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class CausticReached(KvhError):
    """A configuration-space characteristic focused before the requested time."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class BoundaryLeak(KvhError):
    pass


class AxisMismatch(KvhError):
    pass


class ExponentSumInvalid(KvhError):
    pass
