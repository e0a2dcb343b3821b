"""Butterfly factorizations T = P * M * [A2] * A1 and their integer execution.

A1 folds the input into sums and differences of mirrored samples, the
optional A2 stage adds one more butterfly on the even half, M is a
block-diagonal pair of 4x4 kernels over {0, ±1, ±2, ±3}, and P interleaves
the even and odd halves back into natural row order.
"""
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import math
import numpy as np
from scipy import linalg

from src.approx.integer import LowComplexityMatrix
from src.fast.transforms import NamedTransform, get_transform
from src.utils.config import Config
from src.utils.errors import FactorizationError, KLTError, WordOverflowError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

N = 8

A1 = "A1"
A2_PRIME = "A2_prime"
A2_DOUBLEPRIME = "A2_doubleprime"
M = "M"
P = "P"

# Output row r of P takes kernel output PERMUTATION[r]
PERMUTATION = (0, 4, 1, 5, 2, 6, 3, 7)

# id: (extra butterfly stage, M1 constants m0..m15, M2 constants m0..m15)
KERNEL_CONSTANTS: Dict[str, Tuple[Optional[str], Tuple[int, ...], Tuple[int, ...]]] = {
    "T1": (None,
           (0, 1, 1, 1, 1, 1, 0, -1, 1, 0, -1, 1, 1, -1, 1, 0),
           (0, 1, 1, 1, -1, -1, 0, 1, 1, 0, -1, 1, -1, 1, -1, 0)),
    "T3": (None,
           (1, 2, 3, 3, 3, 3, 0, -3, 3, -1, -3, 2, 2, -3, 3, -1),
           (1, 3, 3, 2, -2, -3, 1, 3, 3, 0, -3, 3, -3, 3, -2, 1)),
    "T13": (None,
            (1, 1, 1, 2, 2, 1, 0, -2, 1, -1, -1, 1, 1, -2, 2, -1),
            (0, 1, 2, 2, -1, -2, 0, 2, 2, 0, -2, 1, -2, 2, -1, 0)),
    "T16": (A2_PRIME,
            (2, 2, 2, 0, 0, 2, -1, 3, 2, -2, -2, 0, 0, -3, 3, 1),
            (1, 2, 3, 3, -2, -3, 0, 3, 2, 1, -3, 2, -3, 3, -2, 1)),
    "T17": (A2_PRIME,
            (2, 2, 2, 0, 0, 2, -1, 3, 2, -2, -2, 0, 0, -3, 3, 1),
            (1, 2, 3, 3, -2, -3, 0, 3, 3, 1, -3, 2, -3, 3, -2, 1)),
    "T18": (A2_DOUBLEPRIME,
            (1, 1, 0, 2, 2, 0, 1, -2, 1, -1, 0, 1, 1, 0, -2, -1),
            (0, 1, 2, 2, -1, -2, 0, 2, 2, 0, -2, 1, -2, 2, -1, 0)),
}


def permutation_matrix() -> np.ndarray:
    matrix = np.zeros((N, N), dtype=np.int64)
    matrix[np.arange(N), PERMUTATION] = 1
    return matrix


def a1_matrix() -> np.ndarray:
    half = np.eye(N // 2, dtype=np.int64)
    flip = np.fliplr(half)
    return np.block([[half, flip], [flip, -half]])


def a2_matrix(stage: str) -> np.ndarray:
    """A2' butterflies rows 0 and 3; A2'' butterflies rows 1 and 2."""
    first, second = {A2_PRIME: (0, 3), A2_DOUBLEPRIME: (1, 2)}[stage]
    matrix = np.eye(N, dtype=np.int64)
    matrix[first, second] = 1
    matrix[second, first] = 1
    matrix[second, second] = -1
    return matrix


def kernel_matrix(m1: Sequence[int], m2: Sequence[int]) -> np.ndarray:
    return linalg.block_diag(
        np.reshape(m1, (4, 4)), np.reshape(m2, (4, 4))
    ).astype(np.int64)


@dataclass(frozen=True)
class FastPlan:
    id: str
    factors: Tuple[str, ...]
    m1_constants: Tuple[int, ...]
    m2_constants: Tuple[int, ...]
    add_count: int
    shift_count: int
    bit_growth: int
    
    @property
    def butterfly(self) -> Optional[str]:
        extra = [f for f in self.factors if f in (A2_PRIME, A2_DOUBLEPRIME)]
        return extra[0] if extra else None
    
    def factor_matrices(self) -> List[np.ndarray]:
        lookup = {
            P: permutation_matrix(),
            M: kernel_matrix(self.m1_constants, self.m2_constants),
            A1: a1_matrix(),
        }
        return [lookup[f] if f in lookup else a2_matrix(f) for f in self.factors]
    
    def product(self) -> np.ndarray:
        """Exact integer product of the factor sequence."""
        return np.linalg.multi_dot(self.factor_matrices())


class OpTrace:
    """Counts of the primitive operations performed by CheckedInt values."""
    
    def __init__(self):
        self.counts: Counter = Counter()
    
    def record(self, op: str):
        self.counts[op] += 1
    
    @property
    def adds(self) -> int:
        return self.counts["add"] + self.counts["sub"]
    
    @property
    def shifts(self) -> int:
        return self.counts["shift"]
    
    @property
    def multiplications(self) -> int:
        return self.counts["mul"]


class CheckedInt:
    """Signed integer confined to a fixed word width, optionally traced."""
    
    __slots__ = ("value", "bits", "trace")
    
    def __init__(self, value: int, bits: int, trace: Optional[OpTrace] = None):
        limit = 1 << (bits - 1)
        if not -limit <= value < limit:
            raise WordOverflowError(value, bits)
        self.value = int(value)
        self.bits = bits
        self.trace = trace
    
    def _result(self, value: int, op: str) -> "CheckedInt":
        if self.trace is not None:
            self.trace.record(op)
        return CheckedInt(value, self.bits, self.trace)
    
    def __add__(self, other: "CheckedInt") -> "CheckedInt":
        return self._result(self.value + int(other), "add")
    
    def __sub__(self, other: "CheckedInt") -> "CheckedInt":
        return self._result(self.value - int(other), "sub")
    
    def __neg__(self) -> "CheckedInt":
        return self._result(-self.value, "neg")
    
    def __lshift__(self, amount: int) -> "CheckedInt":
        return self._result(self.value << amount, "shift")
    
    def __mul__(self, other) -> "CheckedInt":
        return self._result(self.value * int(other), "mul")
    
    __rmul__ = __mul__
    
    def __int__(self) -> int:
        return self.value
    
    def __repr__(self) -> str:
        return f"CheckedInt({self.value}, bits={self.bits})"


def _row_cost(row: Iterable[int]) -> Tuple[int, int]:
    """(adds, shifts) of one kernel row: z-1 combining adds, x2 = shift, x3 = shift + add."""
    row = [int(c) for c in row if c]
    threes = sum(1 for c in row if abs(c) == 3)
    twos = sum(1 for c in row if abs(c) == 2)
    return max(len(row) - 1, 0) + threes, twos + threes


def _kernel_cost(m1: Sequence[int], m2: Sequence[int]) -> Tuple[int, int]:
    adds = shifts = 0
    for row in np.reshape(list(m1) + list(m2), (N, 4)):
        row_adds, row_shifts = _row_cost(row)
        adds += row_adds
        shifts += row_shifts
    return adds, shifts


def estimate_ops(t: Union[LowComplexityMatrix, np.ndarray]) -> Tuple[int, int]:
    """(adds, shifts) of a direct row-by-row evaluation of any integer matrix."""
    entries = t.entries if isinstance(t, LowComplexityMatrix) else np.asarray(t)
    adds = shifts = 0
    for row in entries:
        row_adds, row_shifts = _row_cost(row)
        adds += row_adds
        shifts += row_shifts
    return adds, shifts


def bit_growth(transform: Union[str, NamedTransform, LowComplexityMatrix, np.ndarray]) -> int:
    """Worst-case magnitude growth in bits: ceil(log2(max row abs-sum))."""
    if isinstance(transform, str):
        transform = get_transform(transform)
    if isinstance(transform, NamedTransform):
        transform = transform.t
    entries = transform.entries if isinstance(transform, LowComplexityMatrix) else np.asarray(transform)
    max_sum = int(np.max(np.sum(np.abs(entries), axis=1)))
    return math.ceil(math.log2(max_sum)) if max_sum > 0 else 0


def build_plan(named: NamedTransform) -> FastPlan:
    """
    Assemble and verify the fast plan of a published transform.
    
    Raises:
        FactorizationError: the factor product differs from named.t; the
            first mismatching entry is reported
    """
    if named.id not in KERNEL_CONSTANTS:
        raise KLTError(f"no fast algorithm registered for {named.id}")
    stage, m1, m2 = KERNEL_CONSTANTS[named.id]
    factors = (P, M) + ((stage,) if stage else ()) + (A1,)
    
    kernel_adds, shifts = _kernel_cost(m1, m2)
    adds = N + (2 if stage else 0) + kernel_adds
    
    plan = FastPlan(
        id=named.id,
        factors=factors,
        m1_constants=tuple(m1),
        m2_constants=tuple(m2),
        add_count=adds,
        shift_count=shifts,
        bit_growth=bit_growth(named),
    )
    
    product = plan.product()
    mismatches = np.argwhere(product != named.t.entries)
    if mismatches.size:
        i, j = (int(v) for v in mismatches[0])
        raise FactorizationError(
            f"{named.id}: factor product entry ({i},{j}) = {product[i, j]} "
            f"but matrix has {named.t.entries[i, j]}",
            position=(i, j),
        )
    return plan


@lru_cache(maxsize=None)
def plan_for(transform_id: str) -> FastPlan:
    """Verified fast plan for a published transform id."""
    return build_plan(get_transform(transform_id))


def count_ops(transform_id: str) -> Tuple[int, int]:
    """(adds, shifts) of the flow graph of a published transform."""
    plan = plan_for(transform_id)
    return plan.add_count, plan.shift_count


def _scaled(value: CheckedInt, constant: int) -> CheckedInt:
    magnitude = abs(constant)
    if magnitude == 1:
        return value
    if magnitude == 2:
        return value << 1
    if magnitude == 3:
        return (value << 1) + value
    raise KLTError(f"kernel constant {constant} outside {{0, ±1, ±2, ±3}}")


def _kernel_row(constants: Sequence[int], inputs: Sequence[CheckedInt]) -> CheckedInt:
    acc = None
    for constant, value in zip(constants, inputs):
        if constant == 0:
            continue
        term = _scaled(value, constant)
        if acc is None:
            acc = term if constant > 0 else -term
        else:
            acc = acc + term if constant > 0 else acc - term
    return acc if acc is not None else CheckedInt(0, inputs[0].bits, inputs[0].trace)


def apply_fast(
    transform: Union[str, FastPlan],
    x: Sequence[int],
    bits: Optional[int] = None,
    trace: Optional[OpTrace] = None,
) -> np.ndarray:
    """
    Compute T * x through the flow graph using only adds, subtracts and shifts.
    
    Args:
        transform: Published transform id or a FastPlan
        x: Eight integers
        bits: Signed word width for inputs and every intermediate value
            (default: Config.WORD_BITS)
        trace: Optional operation counter
    
    Returns:
        Eight integers, exactly T * x
    
    Raises:
        WordOverflowError: a value leaves the declared word range
    """
    plan = transform if isinstance(transform, FastPlan) else plan_for(transform)
    bits = bits or Config.WORD_BITS
    if len(x) != N:
        raise KLTError(f"fast transforms take {N} samples, got {len(x)}")
    if any(int(v) != v for v in x):
        raise KLTError("fast transforms take integer samples")
    
    u = [CheckedInt(int(v), bits, trace) for v in x]
    
    # A1
    u = [u[i] + u[N - 1 - i] for i in range(N // 2)] + [u[i] - u[N - 1 - i] for i in reversed(range(N // 2))]
    
    if plan.butterfly == A2_PRIME:
        u = [u[0] + u[3], u[1], u[2], u[0] - u[3]] + u[4:]
    elif plan.butterfly == A2_DOUBLEPRIME:
        u = [u[0], u[1] + u[2], u[1] - u[2], u[3]] + u[4:]
    
    # M, two independent 4x4 blocks
    z = []
    for constants, block in ((plan.m1_constants, u[:4]), (plan.m2_constants, u[4:])):
        for r in range(4):
            z.append(_kernel_row(constants[4 * r:4 * r + 4], block))
    
    # P
    return np.array([int(z[src]) for src in PERMUTATION], dtype=np.int64)

