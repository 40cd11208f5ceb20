"""Exception types shared across the library."""


class StructuralError(ValueError):
    """A matrix, pattern, or schedule violates a structural requirement."""


class MatrixMarketError(ValueError):
    """A Matrix Market file could not be parsed.

    The offending line number (1-based, counting every physical line) is
    kept on the ``line`` attribute and prefixed to the message.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FactorizationError(RuntimeError):
    """Numeric factorization could not proceed (zero or unusable pivot)."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class SingularBlockError(FactorizationError):
    """A diagonal block was singular to working precision."""
