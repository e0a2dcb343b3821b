"""Per-slice optimization, shortlist refinement and representative selection."""
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from src.metrics.merit import MAXIMIZED, MeritReport
from src.search.candidates import CandidateRecord
from src.search.kmeans import ClusterAssignment
from src.utils.errors import EmptySliceError, KLTError

# Merit values are compared at this many decimals so that float noise does not
# defeat the complexity tie-break
MERIT_DECIMALS = 12


@dataclass(frozen=True)
class Optimum:
    rho: float
    func: str
    merit: str
    candidate: CandidateRecord


@dataclass(frozen=True)
class ShortlistEntry:
    id: str
    rho: float
    merits: MeritReport
    candidate: Optional[CandidateRecord] = None
    won: Tuple[str, ...] = ()


def _check_merit(merit: str):
    if merit not in ("cg", "eta", "mse", "epsilon"):
        raise KLTError(f"unknown merit {merit!r}; expected cg, eta, mse or epsilon")


def ranking_key(candidate: CandidateRecord, merit: str):
    """Sort key: best merit first, then fewest adds+shifts, then smallest matrix."""
    value = round(candidate.merits.value(merit), MERIT_DECIMALS)
    return (-value if merit in MAXIMIZED else value, candidate.total_ops, candidate.t.key)


def in_interval(rho: float, interval: Optional[Tuple[float, float]]) -> bool:
    """Membership in the half-open interval (low, high]."""
    if interval is None:
        return True
    low, high = interval
    return low < rho <= high


def optimize(
    candidates: Iterable[CandidateRecord],
    merit: str,
    rho_interval: Optional[Tuple[float, float]] = None,
) -> CandidateRecord:
    """
    Pick the best candidate of a slice for one merit.
    
    Args:
        candidates: Candidate records
        merit: cg or eta (maximized), mse or epsilon (minimized)
        rho_interval: Optional (low, high] filter on the candidate rho
    
    Returns:
        The optimum; ties go to fewer adds+shifts, then the
        lexicographically smallest matrix
    
    Raises:
        EmptySliceError: no candidate falls in the slice
    """
    _check_merit(merit)
    pool = [c for c in candidates if in_interval(c.rho, rho_interval)]
    if not pool:
        raise EmptySliceError(f"no candidates for merit {merit} in rho interval {rho_interval}")
    return min(pool, key=lambda c: ranking_key(c, merit))


def per_slice_optima(candidates: Sequence[CandidateRecord], merits: Sequence[str]) -> List[Optimum]:
    """Optimum for every (rho, integer function, merit) combination present."""
    slices: Dict[Tuple[float, str], List[CandidateRecord]] = {}
    for candidate in candidates:
        slices.setdefault((candidate.rho, candidate.func), []).append(candidate)
    
    optima = []
    for (rho, func) in sorted(slices):
        for merit in merits:
            optima.append(Optimum(rho=rho, func=func, merit=merit, candidate=optimize(slices[(rho, func)], merit)))
    return optima


def first_stage_shortlist(per_interval_optima: Sequence[Optimum]) -> List[ShortlistEntry]:
    """
    Reduce the per-slice optima to the best-performing distinct transforms.
    
    For every (rho, merit) pair only the best optimum across integer
    functions survives; survivors that are the same matrix at the same rho
    collapse to one entry. Entries are numbered K1, K2, ... by rho.
    """
    best: Dict[Tuple[float, str], Optimum] = {}
    for optimum in per_interval_optima:
        key = (optimum.rho, optimum.merit)
        current = best.get(key)
        if current is None or ranking_key(optimum.candidate, optimum.merit) < ranking_key(current.candidate, current.merit):
            best[key] = optimum
    
    merit_order = {m: i for i, m in enumerate(("cg", "eta", "mse", "epsilon"))}
    winners: Dict[Tuple[float, tuple], List[Optimum]] = {}
    for key in sorted(best, key=lambda k: (k[0], merit_order[k[1]])):
        optimum = best[key]
        winners.setdefault((optimum.rho, optimum.candidate.t.key), []).append(optimum)
    
    shortlist = []
    for index, group in enumerate(winners.values(), start=1):
        candidate = group[0].candidate
        shortlist.append(ShortlistEntry(
            id=f"K{index}",
            rho=candidate.rho,
            merits=candidate.merits,
            candidate=candidate,
            won=tuple(o.merit for o in group),
        ))
    return shortlist


def reduction_pct(optima_count: int, shortlist_count: int) -> float:
    """Share of per-slice optima removed by the shortlist, in percent."""
    if optima_count == 0:
        return 0.0
    return 100.0 * (optima_count - shortlist_count) / optima_count


def select_representatives(
    shortlist: Sequence[ShortlistEntry],
    clusters: ClusterAssignment,
    merits: Sequence[str] = ("cg", "eta", "mse", "epsilon"),
) -> Dict[int, List[ShortlistEntry]]:
    """
    Per cluster, the members that are best for at least one merit.
    
    Args:
        shortlist: Shortlisted transforms
        clusters: k-means assignment keyed by shortlist entry id
        merits: Merits considered
    
    Returns:
        Cluster index -> representatives, in shortlist order
    """
    representatives: Dict[int, List[ShortlistEntry]] = {}
    for cluster in range(clusters.k):
        members = [e for e in shortlist if clusters.assignment.get(e.id) == cluster]
        if not members:
            representatives[cluster] = []
            continue
        
        chosen = set()
        for merit in merits:
            sign = -1.0 if merit in MAXIMIZED else 1.0
            best = min(members, key=lambda e: sign * round(e.merits.value(merit), MERIT_DECIMALS))
            chosen.add(best.id)
        representatives[cluster] = [e for e in members if e.id in chosen]
    return representatives
