"""Exception hierarchy shared by the library and the command line front end."""


class KpodError(Exception):
    """Base class for every error raised by kpod."""


class InputError(KpodError, ValueError):
    """Invalid user-supplied data or arguments."""


class ParseError(InputError):
    """Malformed LIBSVM text. ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class FormatVersionError(InputError):
    """Model file written with an incompatible format version."""


class NumericalError(KpodError, ArithmeticError):
    """A computation produced values that violate a numerical guarantee."""


class DegenerateClassError(NumericalError):
    """A class subset spans no subspace (all eigenvalues are zero)."""

    def __init__(self, message, label=None):
        self.label = label
        if label is not None:
            message = f"class {label!r}: {message}"
        super().__init__(message)
