"""Exception hierarchy for ifmsim."""


class IFMError(Exception):
    """Base class for all errors raised by ifmsim."""


class BasisError(IFMError, ValueError):
    """A label or map does not match the declared basis of a register."""


class RegisterError(IFMError, KeyError):
    """A register is missing or declared twice."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class NormalizationError(IFMError, ValueError):
    """A state or amplitude specification has the wrong norm."""


class ValidationError(IFMError, ValueError):
    """A scenario failed semantic validation.

    ``path`` is the dotted field path of the offending entry, e.g.
    ``atoms[1].arm``.
    """

    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class ConfigSyntaxError(IFMError, ValueError):
    """A scenario file could not be parsed at all."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")
