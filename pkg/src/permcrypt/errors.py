"""Exception hierarchy shared by every permcrypt module."""


class PermcryptError(Exception):
    """Base class for all errors raised by this package."""


class CapacityError(PermcryptError):
    """A value or intermediate result exceeds the fixed arithmetic width."""


class NotInvertibleError(PermcryptError):
    """Modular inverse requested for a non-coprime pair."""


class ParameterError(PermcryptError):
    """An argument violates an operation's stated precondition."""


class FormatError(PermcryptError):
    """Malformed serialized data. `offset` is the byte position when known."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (offset {offset})"
        super().__init__(message)
        self.offset = offset


class GenerationError(PermcryptError):
    """Key generation could not complete (entropy failure or resample limit)."""


class DecapsulationError(PermcryptError):
    """Ciphertext could not be decapsulated (malformed or degenerate input)."""


class SigningError(PermcryptError):
    """Message hash is degenerate for this key; the message cannot be signed."""
