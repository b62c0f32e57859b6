"""Exception hierarchy shared by all classim modules."""


class ClassimError(Exception):
    """Base class for every error raised by this package."""


class MalformedInputError(ClassimError, ValueError):
    """Input has the wrong shape, non-finite entries, or fails a schema check."""


class UsageError(ClassimError, ValueError):
    """An operation was called in a way its contract does not allow."""


class NotInformationallyCompleteError(ClassimError):
    """The invasive measurement matrix is singular or too ill-conditioned."""


class SingularFrameError(ClassimError):
    """A set of projectors is not a minimal frame (not a basis of operator space)."""


class ConstructionRefusedError(ClassimError):
    """Model construction was refused because the statistics fail a condition."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class InternalInconsistencyError(ClassimError):
    """A zero denominator met a nonzero numerator during model construction."""


class SamplingError(ClassimError):
    """Trajectories cannot be sampled (e.g. the model carries negative weights)."""
