"""Two-stage search pipeline: enumerate, optimize, shortlist, cluster, select."""
import asyncio
import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from src.fast.transforms import REGISTRY
from src.search.candidates import CandidateRecord, SliceResult, evaluate_slice, rho_grid
from src.search.kmeans import ClusterAssignment, kmeans_1d
from src.search.optimizer import (
    Optimum,
    ShortlistEntry,
    first_stage_shortlist,
    per_slice_optima,
    reduction_pct,
    select_representatives,
)
from src.utils.config import Config
from src.utils.errors import KLTError
from src.utils.logger import log_duration, setup_logger

logger = setup_logger(__name__)

TABLE_COLUMNS = ["id", "interval", "rho", "func", "alpha", "cg", "eta", "mse", "epsilon", "won", "cluster"]


@dataclass(frozen=True)
class SearchSettings:
    rho_step: float = 0.1
    alpha_step: float = 0.01
    funcs: Sequence[str] = ("floor", "ceil", "trunc", "round")
    merits: Sequence[str] = ("cg", "eta", "mse", "epsilon")
    clusters: int = 2
    restarts: int = 32
    seed: int = 2024
    workers: int = 1
    
    @classmethod
    def from_config(cls, **overrides) -> "SearchSettings":
        """Settings from Config, with non-None keyword overrides applied."""
        values = dict(
            rho_step=Config.RHO_STEP,
            alpha_step=Config.ALPHA_STEP,
            funcs=tuple(Config.SEARCH_FUNCS),
            merits=tuple(Config.SEARCH_MERITS),
            clusters=Config.KMEANS_CLUSTERS,
            restarts=Config.KMEANS_RESTARTS,
            seed=Config.SEED,
            workers=Config.MAX_WORKERS,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def interval_label(rho: float, step: float, last: bool) -> str:
    low = round(max(rho - step, 0.0), 10)
    return f"({low:g}, 1)" if last else f"({low:g}, {rho:g}]"


def matrix_rows(candidate: CandidateRecord) -> List[List[int]]:
    return [list(row) for row in candidate.t.key]


@dataclass
class SearchReport:
    settings: SearchSettings
    candidates: List[CandidateRecord]
    skipped: Counter
    optima: List[Optimum]
    shortlist: List[ShortlistEntry]
    clusters: Optional[ClusterAssignment]
    representatives: Dict[int, List[ShortlistEntry]] = field(default_factory=dict)
    
    @property
    def reduction_pct(self) -> float:
        return reduction_pct(len(self.optima), len(self.shortlist))
    
    def published_hits(self) -> Dict[str, List[Dict]]:
        """Where each published low-complexity matrix occurs in the candidate set."""
        hits = {transform_id: [] for transform_id in REGISTRY}
        by_matrix = {named.t: transform_id for transform_id, named in REGISTRY.items()}
        for candidate in self.candidates:
            transform_id = by_matrix.get(candidate.t)
            if transform_id:
                hits[transform_id].append({
                    "rho": candidate.rho,
                    "func": candidate.func,
                    "alpha_min": candidate.alpha_span[0],
                    "alpha_max": candidate.alpha_span[1],
                })
        return hits
    
    def merit_table(self) -> pd.DataFrame:
        """Shortlist merits in the layout of the comparison table."""
        last_rho = max((e.rho for e in self.shortlist), default=None)
        rows = []
        for entry in self.shortlist:
            candidate = entry.candidate
            rows.append({
                "id": entry.id,
                "interval": interval_label(entry.rho, self.settings.rho_step, entry.rho == last_rho),
                "rho": entry.rho,
                "func": candidate.func if candidate else "",
                "alpha": candidate.alpha if candidate else float("nan"),
                "cg": entry.merits.cg_db,
                "eta": entry.merits.eta_pct,
                "mse": entry.merits.mse,
                "epsilon": entry.merits.epsilon,
                "won": "+".join(entry.won),
                "cluster": self.clusters.assignment.get(entry.id, -1) if self.clusters else -1,
            })
        return pd.DataFrame(rows, columns=TABLE_COLUMNS)
    
    def to_dict(self) -> Dict:
        def entry_dict(entry: ShortlistEntry) -> Dict:
            candidate = entry.candidate
            return {
                "id": entry.id,
                "rho": entry.rho,
                "func": candidate.func,
                "alpha": candidate.alpha,
                "alpha_span": list(candidate.alpha_span),
                "ops": list(candidate.ops),
                "won": list(entry.won),
                "merits": entry.merits.to_dict(),
                "matrix": matrix_rows(candidate),
            }
        
        return {
            "settings": {
                "rho_step": self.settings.rho_step,
                "alpha_step": self.settings.alpha_step,
                "funcs": list(self.settings.funcs),
                "merits": list(self.settings.merits),
                "clusters": self.settings.clusters,
                "restarts": self.settings.restarts,
                "seed": self.settings.seed,
            },
            "counts": {
                "candidates": len(self.candidates),
                "skipped": dict(sorted(self.skipped.items())),
                "optima": len(self.optima),
                "shortlist": len(self.shortlist),
                "reduction_pct": self.reduction_pct,
            },
            "optima": [
                {"rho": o.rho, "func": o.func, "merit": o.merit,
                 "value": o.candidate.merits.value(o.merit), "matrix": matrix_rows(o.candidate)}
                for o in self.optima
            ],
            "shortlist": [entry_dict(e) for e in self.shortlist],
            "clusters": None if self.clusters is None else {
                "k": self.clusters.k,
                "means": [float(m) for m in self.clusters.means],
                "wcss": self.clusters.wcss,
                "iterations": self.clusters.iterations,
                "assignment": self.clusters.assignment,
            },
            "representatives": {
                str(cluster): [e.id for e in entries] for cluster, entries in self.representatives.items()
            },
            "published": self.published_hits(),
            "candidates": [
                {"rho": c.rho, "func": c.func, "alpha_span": list(c.alpha_span),
                 "ops": list(c.ops), "merits": c.merits.to_dict(), "matrix": matrix_rows(c)}
                for c in self.candidates
            ],
        }
    
    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
    
    def write(self, path: Path, fmt: str = "json"):
        """Write the report as JSON or the shortlist merit table as CSV."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            path.write_text(self.to_json())
        elif fmt == "csv":
            self.merit_table().to_csv(path, index=False, float_format="%.12g")
        else:
            raise KLTError(f"unknown report format {fmt!r}; expected json or csv")


class SearchPipeline:
    """Exhaustive candidate search followed by shortlist refinement and clustering."""
    
    def __init__(self, settings: Optional[SearchSettings] = None):
        self.settings = settings or SearchSettings.from_config()
        self.stats = {
            'slices_done': 0,
            'candidates': 0,
        }
        self._stats_lock = asyncio.Lock()
    
    async def evaluate_slices(self) -> List[SliceResult]:
        """Evaluate every (rho, func) slice, at most settings.workers at a time."""
        semaphore = asyncio.Semaphore(self.settings.workers)
        slices = [(rho, func) for rho in rho_grid(self.settings.rho_step) for func in self.settings.funcs]
        logger.info(
            f"Scanning {len(slices)} slices (rho step {self.settings.rho_step}, "
            f"alpha step {self.settings.alpha_step}, funcs {','.join(self.settings.funcs)})"
        )
        
        async def run_slice(rho: float, func: str) -> SliceResult:
            async with semaphore:
                result = await asyncio.to_thread(evaluate_slice, rho, func, self.settings.alpha_step)
                async with self._stats_lock:
                    self.stats['slices_done'] += 1
                    self.stats['candidates'] += len(result.candidates)
                return result
        
        # gather keeps task order, so the reduction sees slices in grid order
        return await asyncio.gather(*(run_slice(rho, func) for rho, func in slices))
    
    async def run(self) -> SearchReport:
        with log_duration(logger, "Candidate scan"):
            results = await self.evaluate_slices()
        
        candidates: List[CandidateRecord] = []
        skipped: Counter = Counter()
        for result in results:
            candidates.extend(result.candidates)
            skipped.update(result.skipped)
        logger.info(f"{len(candidates)} distinct candidates, skipped {dict(skipped)}")
        
        optima = per_slice_optima(candidates, self.settings.merits)
        shortlist = first_stage_shortlist(optima)
        report = SearchReport(
            settings=self.settings,
            candidates=candidates,
            skipped=skipped,
            optima=optima,
            shortlist=shortlist,
            clusters=None,
        )
        logger.info(
            f"{len(optima)} per-slice optima reduced to {len(shortlist)} transforms "
            f"({report.reduction_pct:.2f}% reduction)"
        )
        
        distinct_gains = {round(e.merits.cg_db, 12) for e in shortlist}
        if len(distinct_gains) >= self.settings.clusters:
            report.clusters = kmeans_1d(
                {e.id: e.merits.cg_db for e in shortlist},
                k=self.settings.clusters,
                seed=self.settings.seed,
                restarts=self.settings.restarts,
            )
            report.representatives = select_representatives(shortlist, report.clusters, self.settings.merits)
            means = ", ".join(f"{m:.4f}" for m in report.clusters.means)
            logger.info(f"k-means cluster means (Cg, dB): {means}")
        else:
            logger.warning(
                f"Only {len(distinct_gains)} distinct coding gains in the shortlist; "
                f"skipping k-means with k={self.settings.clusters}"
            )
        
        missing = [tid for tid, hits in report.published_hits().items() if not hits]
        if missing:
            logger.warning(f"Published matrices not found in the candidate set: {', '.join(missing)}")
        return report
    
    def run_sync(self) -> SearchReport:
        return asyncio.run(self.run())
