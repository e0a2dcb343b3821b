"""Candidate generation over (rho, integer function, alpha)."""
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.approx.integer import LowComplexityMatrix, alpha_grid, apply_int_function, gamma, normalize
from src.fast.plan import estimate_ops
from src.klt.markov import autocorrelation_matrix, exact_klt
from src.metrics.merit import MeritReport, merit_report
from src.utils.errors import AllZeroRowError, KLTError, OutOfAlphabetError, SingularTransformError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

SKIP_OUT_OF_ALPHABET = "out_of_alphabet"
SKIP_ZERO_ROW = "zero_row"
SKIP_SINGULAR = "singular"


@dataclass(frozen=True)
class CandidateRecord:
    t: LowComplexityMatrix
    func: str
    alpha: float
    rho: float
    merits: MeritReport
    # Every alpha on the grid that produced the same matrix in this slice
    alpha_span: Tuple[float, float] = (0.0, 0.0)
    ops: Tuple[int, int] = (0, 0)
    
    @property
    def total_ops(self) -> int:
        return self.ops[0] + self.ops[1]
    
    def reproduce(self) -> LowComplexityMatrix:
        """Rebuild T = int(alpha * K^(rho)) from the provenance."""
        return apply_int_function(self.func, self.alpha, exact_klt(self.rho))


@dataclass
class SliceResult:
    rho: float
    func: str
    candidates: List[CandidateRecord] = field(default_factory=list)
    skipped: Counter = field(default_factory=Counter)
    alphas_scanned: int = 0
    duplicates: int = 0


def rho_grid(step: float = 0.1) -> List[float]:
    """Upper endpoints of the correlation intervals: step, 2*step, ... < 1."""
    if not 0 < step < 1:
        raise KLTError(f"rho step must lie in (0, 1), got {step}")
    count = int(np.ceil(round(1.0 / step, 9))) - 1
    return [round(k * step, 10) for k in range(1, count + 1)]


def evaluate_slice(rho: float, func: str, alpha_step: float) -> SliceResult:
    """
    Scan every alpha for one (rho, func) pair.
    
    Matrices that repeat for consecutive alphas are evaluated once and keep
    the smallest alpha as provenance.
    
    Args:
        rho: Correlation coefficient of the exact KLT
        func: Integer function tag
        alpha_step: Alpha grid step
    
    Returns:
        SliceResult with distinct candidates and counted skip reasons
    """
    model = autocorrelation_matrix(rho)
    klt = exact_klt(rho, model.n)
    result = SliceResult(rho=rho, func=func)
    
    seen: Dict[LowComplexityMatrix, Tuple[float, float]] = {}
    for alpha in alpha_grid(func, gamma(klt), alpha_step):
        result.alphas_scanned += 1
        try:
            t = apply_int_function(func, float(alpha), klt)
        except OutOfAlphabetError:
            result.skipped[SKIP_OUT_OF_ALPHABET] += 1
            continue
        except AllZeroRowError:
            result.skipped[SKIP_ZERO_ROW] += 1
            continue
        
        if t in seen:
            first, _ = seen[t]
            seen[t] = (first, float(alpha))
            result.duplicates += 1
            continue
        seen[t] = (float(alpha), float(alpha))
    
    for t, span in seen.items():
        try:
            merits = merit_report(normalize(t), model, klt)
        except SingularTransformError:
            result.skipped[SKIP_SINGULAR] += 1
            continue
        result.candidates.append(CandidateRecord(
            t=t,
            func=func,
            alpha=span[0],
            rho=rho,
            merits=merits,
            alpha_span=span,
            ops=estimate_ops(t),
        ))
    
    logger.debug(
        f"rho={rho} func={func}: {result.alphas_scanned} alphas, "
        f"{len(result.candidates)} distinct candidates, skipped {dict(result.skipped)}"
    )
    return result


def enumerate_candidates(
    rho_values: Sequence[float],
    alpha_step: float,
    funcs: Sequence[str],
    skipped: Optional[Counter] = None,
) -> Iterator[CandidateRecord]:
    """
    Stream all valid candidates of the grid.
    
    Args:
        rho_values: Correlations to scan, each inside (0, 1)
        alpha_step: Alpha grid step (> 0)
        funcs: Integer function tags
        skipped: Optional counter receiving the skip reasons
    
    Yields:
        CandidateRecord per distinct matrix of every (rho, func) slice
    """
    if alpha_step <= 0:
        raise KLTError(f"alpha step must be > 0, got {alpha_step}")
    for rho in rho_values:
        for func in funcs:
            result = evaluate_slice(rho, func, alpha_step)
            if skipped is not None:
                skipped.update(result.skipped)
            yield from result.candidates
