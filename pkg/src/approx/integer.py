"""Integer candidate matrices and their row normalization."""
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np

from src.klt.markov import ExactTransform
from src.utils.errors import AllZeroRowError, KLTError, OutOfAlphabetError

ALPHABET_MAX = 3

MatrixLike = Union[ExactTransform, np.ndarray]


def _round_away(x: np.ndarray) -> np.ndarray:
    return np.sign(x) * np.ceil(np.abs(x))


def _round_nearest(x: np.ndarray) -> np.ndarray:
    # Ties go away from zero
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


INT_FUNCTIONS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "floor": np.floor,
    "ceil": np.ceil,
    "trunc": np.trunc,
    "round_afz": _round_away,
    "round": _round_nearest,
}

# Interval endpoints as multiples of 1/gamma
_ALPHA_LIMITS: Dict[str, Tuple[float, float]] = {
    "floor": (1.0, 4.0),
    "trunc": (1.0, 4.0),
    "ceil": (0.0, 3.0),
    "round_afz": (0.0, 3.0),
    "round": (0.0, 3.5),
}


@dataclass(frozen=True)
class Provenance:
    func: str
    alpha: float
    rho: float


@dataclass(frozen=True, eq=False)
class LowComplexityMatrix:
    """Integer matrix over {0, ±1, ±2, ±3} with no all-zero row."""
    entries: np.ndarray
    provenance: Optional[Provenance] = None
    
    def __post_init__(self):
        entries = np.asarray(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise KLTError(f"integer matrix must be square, got shape {entries.shape}")
        if not np.all(np.equal(np.mod(entries, 1), 0)):
            raise KLTError("integer matrix has non-integer entries")
        entries = entries.astype(np.int64)
        
        too_large = np.argwhere(np.abs(entries) > ALPHABET_MAX)
        if too_large.size:
            i, j = too_large[0]
            raise OutOfAlphabetError(f"entry ({i},{j}) = {entries[i, j]} outside {{0, ±1, ±2, ±3}}")
        zero_rows = np.flatnonzero(~entries.any(axis=1))
        if zero_rows.size:
            raise AllZeroRowError(f"row {zero_rows[0]} is all zeros")
        
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
    
    @property
    def key(self) -> Tuple[Tuple[int, ...], ...]:
        """Hashable value of the matrix, used for deduplication and ordering."""
        return tuple(tuple(int(v) for v in row) for row in self.entries)
    
    def __eq__(self, other) -> bool:
        return isinstance(other, LowComplexityMatrix) and self.key == other.key
    
    def __hash__(self) -> int:
        return hash(self.key)


@dataclass(frozen=True)
class ApproximateTransform:
    t: LowComplexityMatrix
    s_diag: np.ndarray
    k_hat: np.ndarray
    orthogonal: bool


def _as_matrix(k: MatrixLike) -> np.ndarray:
    return np.asarray(k.matrix if isinstance(k, ExactTransform) else k, dtype=float)


def apply_int_function(func: str, alpha: float, k: MatrixLike, rho: Optional[float] = None) -> LowComplexityMatrix:
    """
    Quantize alpha * K entrywise with an integer function.
    
    Args:
        func: One of floor, ceil, trunc, round_afz, round
        alpha: Expansion factor (> 0)
        k: Exact transform or dense matrix
        rho: Correlation of k, recorded in the provenance (defaults to k.rho)
    
    Returns:
        LowComplexityMatrix with provenance (func, alpha, rho)
    
    Raises:
        OutOfAlphabetError: an entry magnitude exceeds 3
        AllZeroRowError: a row quantizes to zeros
    """
    if func not in INT_FUNCTIONS:
        raise KLTError(f"unknown integer function: {func}")
    if alpha <= 0:
        raise KLTError(f"alpha must be > 0, got {alpha}")
    if rho is None and isinstance(k, ExactTransform):
        rho = k.rho
    
    entries = INT_FUNCTIONS[func](alpha * _as_matrix(k))
    return LowComplexityMatrix(entries=entries, provenance=Provenance(func, float(alpha), rho))


def alpha_range(func: str, gamma: float) -> Tuple[float, float]:
    """Open interval of expansion factors that can land in the alphabet."""
    if func not in _ALPHA_LIMITS:
        raise KLTError(f"unknown integer function: {func}")
    if gamma <= 0:
        raise KLTError(f"gamma must be > 0, got {gamma}")
    low, high = _ALPHA_LIMITS[func]
    return low / gamma, high / gamma


def alpha_grid(func: str, gamma: float, step: float) -> np.ndarray:
    """
    Multiples of step strictly inside alpha_range(func, gamma).
    
    The first value is the smallest multiple of step above the lower endpoint.
    """
    if step <= 0:
        raise KLTError(f"alpha step must be > 0, got {step}")
    low, high = alpha_range(func, gamma)
    first = int(np.floor(low / step)) + 1
    last = int(np.ceil(high / step)) - 1
    alphas = np.round(np.arange(first, last + 1) * step, 10)
    return alphas[(alphas > low) & (alphas < high)]


def gamma(k: MatrixLike) -> float:
    """Largest absolute entry of the matrix."""
    value = float(np.max(np.abs(_as_matrix(k))))
    if value == 0.0:
        raise KLTError("gamma is undefined for the zero matrix")
    return value


def is_orthogonal(t: LowComplexityMatrix) -> bool:
    """Exact integer check that T * T^T is diagonal."""
    gram = t.entries @ t.entries.T
    return not np.any(gram - np.diag(np.diag(gram)))


def normalize(t: LowComplexityMatrix) -> ApproximateTransform:
    """
    Scale every row of T to unit Euclidean norm.
    
    For orthogonal T this is exactly sqrt((T T^T)^-1) T; for non-orthogonal T
    the diagonal form is used as well and the orthogonality flag is recorded.
    """
    norms_sq = np.sum(t.entries.astype(float) ** 2, axis=1)
    if np.any(norms_sq == 0):
        raise AllZeroRowError(f"row {int(np.flatnonzero(norms_sq == 0)[0])} is all zeros")
    s_diag = 1.0 / np.sqrt(norms_sq)
    k_hat = s_diag[:, None] * t.entries
    return ApproximateTransform(t=t, s_diag=s_diag, k_hat=k_hat, orthogonal=is_orthogonal(t))
