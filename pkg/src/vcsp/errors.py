class VcspError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(VcspError, ValueError):
    """An object violates a structural invariant (arity, scope, table shape...)."""


class SizeLimitError(VcspError):
    """An exhaustive computation would exceed the configured enumeration budget."""


class FormatError(VcspError):
    """A text artifact could not be parsed.  Always carries a line number."""

    def __init__(self, message, line=None, file=None):
        self.message = message
        self.line = line
        self.file = file
        where = file or "<text>"
        if line is not None:
            where = f"{where}:{line}"
        super().__init__(f"{where}: {message}")
