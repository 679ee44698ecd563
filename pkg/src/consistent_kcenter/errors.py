"""Exception hierarchy shared by the library and the CLI."""


class KCenterError(Exception):
    """Base class for every error raised by this package."""


class UnknownPointError(KCenterError, KeyError):
    """A point id (or node id) is not known to the structure it was looked up in."""

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return Exception.__str__(self)


class StateError(KCenterError):
    """An operation does not apply to the current state (duplicate insert, missing edge, ...)."""


class InputError(KCenterError, ValueError):
    """Input data violates a distance or structural precondition."""


class PreconditionError(KCenterError):
    """A documented precondition of an operation does not hold."""


class OracleCapacityError(KCenterError):
    """Exhaustive enumeration would exceed the configured cap."""


class StreamParseError(KCenterError):
    """A stream file is malformed."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
