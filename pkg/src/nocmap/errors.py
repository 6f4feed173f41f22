class NocMapError(Exception):
    """Base class for all errors raised by nocmap."""


class ApcgError(NocMapError, ValueError):
    """The task graph violates a structural invariant."""


class SizingError(NocMapError, ValueError):
    """The application does not fit the mesh (or the mesh is too small)."""


class MappingError(NocMapError, ValueError):
    def __init__(self, message: str, core: int | None = None):
        super().__init__(message)
        self.core = core


class ParseError(NocMapError, ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.reason = message


class GenerationError(NocMapError, RuntimeError):
    pass


class ReportError(NocMapError, ValueError):
    pass
