"""Exception taxonomy shared across the package."""


class CylstereoError(Exception):
    """Base class for all package errors."""


class InputDomainError(CylstereoError, ValueError):
    """An argument violates an operation's stated domain."""


class DegenerateDirectionError(InputDomainError):
    """A direction vector has no usable horizontal component."""


class DegenerateFrustumError(CylstereoError):
    """The eye lies on (or behind) the projection plane."""


class CullingViolationError(CylstereoError):
    """Sampling touched a cubemap face the culler did not schedule.

    Raised by the canvas sampler; indicates a culler bug, never a user error.
    """


class ProbeMissError(CylstereoError):
    """A marker color was not found in one of the stereo canvases."""


class SceneParseError(CylstereoError):
    """A scene document failed validation.

    ``path`` points at the offending field, e.g. ``primitives[2].radius``.
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
