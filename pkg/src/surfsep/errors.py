"""Exception hierarchy shared by every module of the package."""


class SurfsepError(Exception):
    """Base class for all errors raised by surfsep."""


class MalformedRotation(SurfsepError):
    pass


class IndexOutOfRange(SurfsepError):
    pass


class NonIntegerGenus(SurfsepError):
    pass


class DegenerateFace(SurfsepError):
    pass


class NotACycle(SurfsepError):
    pass


class ComponentTooSmall(SurfsepError):
    pass


class OverlappingTreePaths(SurfsepError):
    pass


class InsideNotPlanar(SurfsepError):
    pass


class NotPlanar(SurfsepError):
    pass


class IterationLimitExceeded(SurfsepError):
    pass


class TooSmall(SurfsepError):
    pass


class InvariantViolation(SurfsepError):
    """A structural property the construction relies on did not hold.

    ``stage`` names the pipeline step that failed.
    """

    def __init__(self, stage, message=""):
        self.stage = stage
        super().__init__(f"[{stage}] {message}" if message else stage)
