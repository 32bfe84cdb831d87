from typing import Optional


class JumpDetectionError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(JumpDetectionError, ValueError):
    """
    Raised when inputs have incompatible shapes, lengths or indices, e.g., a
    record count that is not a multiple of the number of intraday slots.
    """


class DomainError(JumpDetectionError, ValueError):
    """
    Raised when a value lies outside the mathematical domain of an
    operation, e.g., a non-positive price or a slot length of one year or
    more.
    """


class DegenerateInputError(JumpDetectionError, ValueError):
    """Raised when the realized variance of a return panel is zero."""


class InputDataError(JumpDetectionError, ValueError):
    """
    Raised when a data file contains an entry that cannot be used.

    Parameters
    ----------
    message : str
        Human-readable description of the problem.

    path : str, optional
        File the entry was read from.

    line : int, optional
        1-based line number of the entry in the file.

    index : int, optional
        0-based flat index of the entry in the return sequence.
    """

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
        index: Optional[int] = None,
    ) -> None:
        location = []
        if path is not None:
            location.append(str(path))
        if line is not None:
            location.append(f"line {line}")

        if location:
            message = f"{':'.join(location)}: {message}"

        super().__init__(message)

        self.path = path
        self.line = line
        self.index = index


class ConfigurationError(JumpDetectionError, ValueError):
    """
    Raised when a configuration object holds an invalid value.

    Parameters
    ----------
    field : str
        Name of the offending configuration field.

    message : str
        Description of the constraint that was violated.
    """

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")

        self.field = field


class JumpDetectionWarning(UserWarning):
    """
    Issued for recoverable anomalies such as undefined TOD slots or a
    detection run that hit its round limit.
    """
