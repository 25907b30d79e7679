"""
Exception hierarchy shared by every IRConStyle module
"""

from typing import Any, Dict, Optional


class ConStyleError(Exception):
    """Base class for all framework errors"""

    exit_code = 1

    def to_record(self) -> Dict[str, Any]:
        """
        Machine-readable form used by the CLI error line

        Returns:
            Dictionary with error class, message and exit code
        """
        return {
            "error": self.__class__.__name__,
            "message": str(self),
            "exit_code": self.exit_code,
        }


class DimensionError(ConStyleError, ValueError):
    """Shapes disagree or a dimension is not divisible as required"""


class DomainError(ConStyleError, ValueError):
    """Value outside the domain of an operation"""


class NonFiniteError(ConStyleError, ArithmeticError):
    """An operation produced NaN or Inf from its inputs"""


class ContractError(ConStyleError, ValueError):
    """A precondition of an operation was violated"""


class ModelError(ConStyleError):
    """Two models that must correspond parameter-for-parameter do not"""


class StateError(ConStyleError, RuntimeError):
    """Operation not valid in the current object state"""


class TrainingError(ConStyleError, RuntimeError):
    """Training produced a non-finite loss or gradient"""

    def __init__(self, message: str, breakdown: Optional[Dict[str, float]] = None,
                 parameter: Optional[str] = None):
        super().__init__(message)
        self.breakdown = breakdown
        self.parameter = parameter


class ConfigError(ConStyleError, ValueError):
    """Invalid configuration; `field` holds the dotted path when known"""

    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class DataError(ConStyleError, IOError):
    """A corpus file is missing, unreadable or too small"""

    exit_code = 3

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message)
        self.path = path


class CheckpointError(ConStyleError, IOError):
    """Checkpoint file is malformed"""

    exit_code = 3


class CheckpointVersionError(CheckpointError):
    """Checkpoint was written by an unsupported format version"""

    exit_code = 4


class ImageFormatError(ConStyleError, ValueError):
    """Input image is not an RGB PNG"""

    exit_code = 5
