# edibnet/errors.py


class EdibnetError(Exception):
    """Base class for every error raised by edibnet."""


class ShapeError(EdibnetError, ValueError):
    """Tensor dimensions do not fit the operation."""


class NumericError(EdibnetError, ArithmeticError):
    """A NaN or Inf appeared where only finite values are allowed."""


class TapeError(EdibnetError):
    """Reverse sweep asked for something the tape never recorded."""


class DataError(EdibnetError):
    """Input file is missing, malformed, truncated or of an unsupported kind."""


class ConfigError(EdibnetError, ValueError):
    """Configuration values are invalid or unknown."""
