"""Registry of the six published low-complexity KLT approximations."""
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np

from src.approx.integer import LowComplexityMatrix, normalize
from src.klt.markov import dct_reference, exact_klt
from src.utils.errors import KLTError

GROUP_LOW = "C1"   # rho in (0, 0.7]
GROUP_HIGH = "C2"  # rho in (0.7, 1)


@dataclass(frozen=True)
class NamedTransform:
    id: str
    t: LowComplexityMatrix
    group: str
    interval: Tuple[float, float]
    # Correlation of the exact KLT the matrix approximates (upper end of interval)
    reference_rho: float
    published_ops: Tuple[int, int]


_T16 = [
    [2, 2, 2, 2, 2, 2, 2, 2],
    [3, 3, 2, 1, -1, -2, -3, -3],
    [3, 2, -1, -3, -3, -1, 2, 3],
    [3, 0, -3, -2, 2, 3, 0, -3],
    [2, -2, -2, 2, 2, -2, -2, 2],
    [2, -3, 1, 2, -2, -1, 3, -2],
    [1, -3, 3, -1, -1, 3, -3, 1],
    [1, -2, 3, -3, 3, -3, 2, -1],
]

_T13 = [
    [1, 1, 1, 2, 2, 1, 1, 1],
    [2, 2, 1, 0, 0, -1, -2, -2],
    [2, 1, 0, -2, -2, 0, 1, 2],
    [2, 0, -2, -1, 1, 2, 0, -2],
    [1, -1, -1, 1, 1, -1, -1, 1],
    [1, -2, 0, 2, -2, 0, 2, -1],
    [1, -2, 2, -1, -1, 2, -2, 1],
    [0, -1, 2, -2, 2, -2, 1, 0],
]

MATRICES: Dict[str, list] = {
    "T1": [
        [0, 1, 1, 1, 1, 1, 1, 0],
        [1, 1, 1, 0, 0, -1, -1, -1],
        [1, 1, 0, -1, -1, 0, 1, 1],
        [1, 0, -1, -1, 1, 1, 0, -1],
        [1, 0, -1, 1, 1, -1, 0, 1],
        [1, -1, 0, 1, -1, 0, 1, -1],
        [1, -1, 1, 0, 0, 1, -1, 1],
        [0, -1, 1, -1, 1, -1, 1, 0],
    ],
    "T3": [
        [1, 2, 3, 3, 3, 3, 2, 1],
        [2, 3, 3, 1, -1, -3, -3, -2],
        [3, 3, 0, -3, -3, 0, 3, 3],
        [3, 1, -3, -2, 2, 3, -1, -3],
        [3, -1, -3, 2, 2, -3, -1, 3],
        [3, -3, 0, 3, -3, 0, 3, -3],
        [2, -3, 3, -1, -1, 3, -3, 2],
        [1, -2, 3, -3, 3, -3, 2, -1],
    ],
    "T13": _T13,
    "T16": _T16,
    "T17": _T16[:5] + [[2, -3, 1, 3, -3, -1, 3, -2]] + _T16[6:],
    "T18": _T13[:2] + [[2, 1, -1, -2, -2, -1, 1, 2]] + _T13[3:],
}

_META = {
    # id: (group, interval, reference rho, published (adds, shifts))
    "T1": (GROUP_LOW, (0.0, 0.1), 0.1, (24, 0)),
    "T3": (GROUP_LOW, (0.0, 0.1), 0.1, (48, 24)),
    "T13": (GROUP_LOW, (0.6, 0.7), 0.7, (26, 13)),
    "T16": (GROUP_HIGH, (0.7, 0.8), 0.8, (38, 22)),
    "T17": (GROUP_HIGH, (0.7, 0.8), 0.8, (38, 22)),
    "T18": (GROUP_HIGH, (0.8, 1.0), 0.9, (26, 12)),
}

TRANSFORM_IDS = tuple(MATRICES)


def _build_registry() -> Dict[str, NamedTransform]:
    registry = {}
    for transform_id, entries in MATRICES.items():
        group, interval, reference_rho, published_ops = _META[transform_id]
        registry[transform_id] = NamedTransform(
            id=transform_id,
            t=LowComplexityMatrix(np.array(entries)),
            group=group,
            interval=interval,
            reference_rho=reference_rho,
            published_ops=published_ops,
        )
    return registry


REGISTRY: Dict[str, NamedTransform] = _build_registry()


def get_transform(transform_id: str) -> NamedTransform:
    """Look up a published transform by id (T1, T3, T13, T16, T17, T18)."""
    key = transform_id.upper()
    if key not in REGISTRY:
        raise KLTError(f"unknown transform id {transform_id!r}; expected one of {', '.join(TRANSFORM_IDS)}")
    return REGISTRY[key]


@lru_cache(maxsize=64)
def resolve_transform(spec: str, rho: Optional[float] = None) -> Tuple[np.ndarray, bool]:
    """
    Dense 8x8 matrix and orthogonality flag for a transform spec.

    Args:
        spec: T1..T18 (normalized approximation), "dct", "klt:<rho>", or
            "klt" together with rho

    Returns:
        (matrix, orthogonal); the matrix is shared and read-only
    """
    key = spec.strip().lower()
    if key == "dct":
        matrix, orthogonal = dct_reference(8).matrix, True
    elif key == "klt" or key.startswith("klt:"):
        if key == "klt":
            if rho is None:
                raise KLTError("bare 'klt' needs a correlation; use klt:<rho> or pass --rho")
        else:
            try:
                rho = float(key[4:])
            except ValueError as e:
                raise KLTError(f"cannot parse correlation in {spec!r}") from e
        return exact_klt(rho).matrix, True
    else:
        approx = normalize(get_transform(spec).t)
        matrix, orthogonal = approx.k_hat.copy(), approx.orthogonal
    matrix.setflags(write=False)
    return matrix, orthogonal
