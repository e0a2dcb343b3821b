"""Exception hierarchy for transform generation, search and coding."""
from typing import Optional, Tuple


class KLTError(ValueError):
    """Base class for every domain error raised by this package."""


class RootFindingError(KLTError):
    """The frequency equation did not yield the expected number of roots."""
    
    def __init__(self, message: str, brackets: Optional[list] = None):
        super().__init__(message)
        self.brackets = brackets or []


class OutOfAlphabetError(KLTError):
    """An integer matrix entry fell outside {0, ±1, ±2, ±3}."""


class AllZeroRowError(KLTError):
    """An integer matrix has a row with no nonzero entry."""


class SingularTransformError(KLTError):
    """A transform is not invertible within the condition-number guard."""


class EmptySliceError(KLTError):
    """No candidate is available for the requested optimization slice."""


class WordOverflowError(KLTError):
    """A fast-transform intermediate value left the declared word range."""
    
    def __init__(self, value: int, bits: int):
        super().__init__(f"value {value} does not fit in signed {bits}-bit word")
        self.value = value
        self.bits = bits


class DimensionMismatchError(KLTError):
    """Two operands that must have the same shape do not."""


class FactorizationError(KLTError):
    """A fast-algorithm factor product disagrees with its dense matrix."""
    
    def __init__(self, message: str, position: Optional[Tuple[int, int]] = None):
        super().__init__(message)
        self.position = position


class ImageFormatError(KLTError):
    """An image cannot be read, written or coded."""
