"""
Exception types used to tell usage, data and numerical failures apart
"""


class UsageError(ValueError):
    """
    Raised when a command or configuration is used incorrectly.
    """


class DataError(ValueError):
    """
    Raised when an input dataset is missing, malformed or unusable.
    """

    def __init__(self, message: str, line: int = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericalError(ArithmeticError):
    """
    Raised when a computed quantity is not finite or violates a numerical tolerance.
    """
