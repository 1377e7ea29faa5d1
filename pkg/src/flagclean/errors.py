"""Exception hierarchy shared by all flagclean modules."""


class FlagCleanError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(FlagCleanError, ValueError):
    pass


class NonInvertible(FlagCleanError, ValueError):
    """Exponent matrix is not unimodular (det != +-1)."""


class CoefficientObstruction(FlagCleanError, ValueError):
    """Coefficient system of an inverse has no solution in nonzero rationals."""


class MissingParameter(FlagCleanError, KeyError):
    def __init__(self, names):
        self.names = tuple(sorted(names))
        super().__init__(f"no value given for parameter(s): {', '.join(self.names)}")

    def __str__(self):
        return self.args[0]


class Disconnected(FlagCleanError, LookupError):
    """No chain of declared transitions links the two charts."""


class WindowTooSmall(FlagCleanError, ValueError):
    def __init__(self, window, required):
        self.window = window
        self.required = required
        super().__init__(f"window bound {window} is below the required {required}")


class NonUnitDeterminant(FlagCleanError, ValueError):
    pass


class Diagnostic:
    """One located problem in a model file."""

    __slots__ = ("path", "line", "column", "message", "source")

    def __init__(self, path, line, column, message, source=None):
        self.path = path
        self.line = line
        self.column = column
        self.message = message
        self.source = source

    def __str__(self):
        loc = f"{self.line}:{self.column}" if self.line is not None else "?:?"
        if self.source:
            loc = f"{self.source}:{loc}"
        return f"{loc}: {self.path or '<root>'}: {self.message}"

    def __repr__(self):
        return f"Diagnostic({str(self)!r})"


class ModelFileError(FlagCleanError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class ParseError(ModelFileError):
    pass


class ValidationError(ModelFileError):
    pass
