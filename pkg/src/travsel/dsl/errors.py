class DslError(Exception):
    """Base class for DSL failures.  Carries an optional source position."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"line {line}, col {col}: {message}"
        super().__init__(message)

    @classmethod
    def at(cls, message: str, pos):
        if pos is None:
            return cls(message)
        return cls(message, *pos)


class DslSyntaxError(DslError):
    pass


class DslNameError(DslError):
    pass


class DslTypeError(DslError):
    pass


class DslRuntimeError(DslError):
    pass
