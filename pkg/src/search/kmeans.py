"""Seeded multi-restart k-means on one-dimensional data."""
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Union

import numpy as np

from src.utils.errors import KLTError

MAX_ITERATIONS = 100


@dataclass(frozen=True)
class ClusterAssignment:
    k: int
    means: np.ndarray
    assignment: Dict[str, int]
    iterations: int
    wcss: float
    # Within-cluster sum of squares after every iteration of the winning restart
    history: List[float] = field(default_factory=list)
    
    def members(self, cluster: int) -> List[str]:
        return [key for key, c in self.assignment.items() if c == cluster]


def _wcss(points: np.ndarray, labels: np.ndarray, means: np.ndarray) -> float:
    return float(np.sum((points - means[labels]) ** 2))


def _lloyd(points: np.ndarray, means: np.ndarray):
    """Run Lloyd iterations until no assignment changes."""
    labels = np.argmin(np.abs(points[:, None] - means[None, :]), axis=1)
    history = []
    iterations = 0
    while iterations < MAX_ITERATIONS:
        iterations += 1
        for j in range(means.size):
            assigned = points[labels == j]
            # An emptied cluster keeps its previous mean
            if assigned.size:
                means[j] = assigned.mean()
        history.append(_wcss(points, labels, means))
        
        new_labels = np.argmin(np.abs(points[:, None] - means[None, :]), axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return labels, means, iterations, history


def kmeans_1d(
    values: Union[Mapping[str, float], Sequence[float]],
    k: int,
    seed: int,
    restarts: int = 32,
) -> ClusterAssignment:
    """
    Cluster scalar values with k-means, keeping the best of several restarts.
    
    Each restart draws k distinct values as initial means. Clusters are
    relabelled by ascending mean so that equal inputs give equal outputs.
    
    Args:
        values: Id -> value mapping, or a sequence (ids are "0", "1", ...)
        k: Number of clusters
        seed: PRNG seed
        restarts: Number of random initializations (>= 1)
    
    Returns:
        ClusterAssignment with the lowest within-cluster sum of squares
    """
    if isinstance(values, Mapping):
        keys = list(values.keys())
        points = np.array([values[key] for key in keys], dtype=float)
    else:
        points = np.asarray(values, dtype=float)
        keys = [str(i) for i in range(points.size)]
    
    distinct = np.unique(points)
    if k < 1:
        raise KLTError(f"k must be >= 1, got {k}")
    if k > distinct.size:
        raise KLTError(f"k={k} exceeds the {distinct.size} distinct values")
    if restarts < 1:
        raise KLTError(f"restarts must be >= 1, got {restarts}")
    
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        initial = rng.choice(distinct, size=k, replace=False).astype(float)
        labels, means, iterations, history = _lloyd(points, initial)
        score = history[-1]
        if best is None or score < best[0]:
            best = (score, labels, means, iterations, history)
    
    score, labels, means, iterations, history = best
    order = np.argsort(means, kind="stable")
    relabel = np.empty(k, dtype=int)
    relabel[order] = np.arange(k)
    
    return ClusterAssignment(
        k=k,
        means=means[order],
        assignment={key: int(relabel[label]) for key, label in zip(keys, labels)},
        iterations=iterations,
        wcss=score,
        history=history,
    )
