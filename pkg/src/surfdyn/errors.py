"""Exception hierarchy shared by every module."""


class SurfDynError(Exception):
    """Base class for all library errors."""


class InputError(SurfDynError, ValueError):
    """Malformed or inconsistent input."""


class ParseError(InputError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class PreconditionError(SurfDynError):
    """An operation was called outside its domain."""


class DegenerateCompositionError(SurfDynError):
    """A composite factor collapsed to zero (image inside the indeterminacy locus)."""


class ResourceError(SurfDynError):
    """The degree budget was exceeded.

    ``last_completed`` is the index of the last iterate that was finished and
    ``partial`` holds whatever was computed before the abort.
    """

    def __init__(self, message, last_completed, partial=()):
        super().__init__(message)
        self.last_completed = last_completed
        self.partial = list(partial)


class GenericityError(SurfDynError):
    """Randomized trials disagreed or never reached general position."""


class UnsupportedConeError(SurfDynError):
    """Cone data that the exact nef test cannot handle."""
