"""Exception hierarchy shared by every module of the package."""


class LDCodecError(Exception):
    """Base class for all errors raised by ldcodec."""

    exit_code = 1


class AddressError(LDCodecError, IndexError):
    """A bit address, field or message index lies outside its valid range."""

    exit_code = 3


class InvalidParams(LDCodecError, ValueError):
    """Structural parameters violate a divisibility or capacity constraint."""

    exit_code = 2


class CapacityExceeded(LDCodecError):
    """A sparse structure would need more chunks than it has."""

    exit_code = 5


class LengthError(LDCodecError, ValueError):
    """An input vector has the wrong length."""

    exit_code = 2


class NotTypical(LDCodecError, ValueError):
    """rank() was called on a vector outside the typical set."""

    exit_code = 2


class BlockFailed(LDCodecError):
    """The block covering a position is flagged as unrecoverable."""

    exit_code = 4


class MalformedContainer(LDCodecError, ValueError):
    """A serialized container does not parse or is internally inconsistent."""

    exit_code = 6


class Infeasible(LDCodecError, ValueError):
    """No parameter set satisfies the sizing constraints."""

    exit_code = 7

    def __init__(self, message, min_feasible_n=None):
        super().__init__(message)
        self.min_feasible_n = min_feasible_n
