"""Coding gain, transform efficiency, MSE and total error energy."""
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd
from scipy import linalg

from src.approx.integer import ApproximateTransform, LowComplexityMatrix, normalize
from src.klt.markov import CorrelationModel, ExactTransform, autocorrelation_matrix, exact_klt
from src.utils.errors import DimensionMismatchError, SingularTransformError

CONDITION_LIMIT = 1e12
INVERSE_RESIDUAL_TOL = 1e-9

# Merits to maximize; the rest are minimized
MAXIMIZED = frozenset({"cg", "eta"})

TransformLike = Union[ApproximateTransform, ExactTransform, LowComplexityMatrix, np.ndarray]


@dataclass(frozen=True)
class MeritReport:
    cg_db: float
    eta_pct: float
    mse: float
    epsilon: float
    rho_ref: Optional[float]
    
    def value(self, merit: str) -> float:
        """Look a merit up by its short tag (cg, eta, mse, epsilon)."""
        return {"cg": self.cg_db, "eta": self.eta_pct, "mse": self.mse, "epsilon": self.epsilon}[merit]
    
    def to_dict(self) -> Dict:
        return asdict(self)


def as_dense(k: TransformLike) -> np.ndarray:
    """Dense real matrix of any transform representation (integers are normalized)."""
    if isinstance(k, ApproximateTransform):
        return k.k_hat
    if isinstance(k, LowComplexityMatrix):
        return normalize(k).k_hat
    if isinstance(k, ExactTransform):
        return k.matrix
    return np.asarray(k, dtype=float)


def _check_same_shape(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape {a.shape} does not match {b.shape}")


def invert(k_hat: TransformLike) -> np.ndarray:
    """
    Invert a transform matrix.
    
    Raises:
        SingularTransformError: condition number at or above 1e12, or the
            product residual is not below 1e-9
    """
    k = as_dense(k_hat)
    cond = np.linalg.cond(k)
    if not np.isfinite(cond) or cond >= CONDITION_LIMIT:
        raise SingularTransformError(f"transform condition number {cond:.3e} exceeds {CONDITION_LIMIT:.0e}")
    
    identity = np.eye(k.shape[0])
    inverse = linalg.solve(k, identity)
    residual = np.max(np.abs(k @ inverse - identity))
    if residual >= INVERSE_RESIDUAL_TOL:
        raise SingularTransformError(f"inverse residual {residual:.3e} exceeds {INVERSE_RESIDUAL_TOL}")
    return inverse


def coding_gain(k_hat: TransformLike, model: CorrelationModel) -> float:
    """
    Unified coding gain in dB.
    
    A_k is the k-th row's quadratic form with R_x; B_k is the squared norm
    of the k-th row of the inverse. Cg = 10 log10 prod_k (A_k B_k)^(-1/N).
    """
    k = as_dense(k_hat)
    _check_same_shape(k, model.r_matrix)
    a = np.einsum("ki,ij,kj->k", k, model.r_matrix, k)
    b = np.sum(invert(k) ** 2, axis=1)
    return float(-10.0 * np.mean(np.log10(a * b)))


def transform_efficiency(k_hat: TransformLike, model: CorrelationModel) -> float:
    """Percentage of |K R_x K^T| mass on the diagonal."""
    k = as_dense(k_hat)
    _check_same_shape(k, model.r_matrix)
    r = np.abs(k @ model.r_matrix @ k.T)
    return float(100.0 * np.trace(r) / np.sum(r))


def mse(k_ref: TransformLike, k_hat: TransformLike, model: CorrelationModel) -> float:
    """(1/N) trace((K - K_hat) R_x (K - K_hat)^T)."""
    ref, k = as_dense(k_ref), as_dense(k_hat)
    _check_same_shape(ref, k)
    _check_same_shape(k, model.r_matrix)
    diff = ref - k
    return float(np.trace(diff @ model.r_matrix @ diff.T) / k.shape[0])


def total_error_energy(k_ref: TransformLike, k_hat: TransformLike) -> float:
    """pi * ||K - K_hat||_F^2, independent of R_x."""
    ref, k = as_dense(k_ref), as_dense(k_hat)
    _check_same_shape(ref, k)
    return float(np.pi * np.sum((ref - k) ** 2))


def merit_report(
    k_hat: TransformLike,
    model: CorrelationModel,
    k_ref: Optional[ExactTransform] = None,
) -> MeritReport:
    """
    Evaluate all four merits.
    
    Args:
        k_hat: Transform under evaluation
        model: Correlation model for cg, eta and mse
        k_ref: Exact transform for the similarity merits (default: the
            exact KLT of model.rho)
    
    Returns:
        MeritReport
    """
    if k_ref is None:
        k_ref = exact_klt(model.rho, model.n)
    return MeritReport(
        cg_db=coding_gain(k_hat, model),
        eta_pct=transform_efficiency(k_hat, model),
        mse=mse(k_ref, k_hat, model),
        epsilon=total_error_energy(k_ref, k_hat),
        rho_ref=k_ref.rho,
    )


def compare(transforms: Dict[str, TransformLike], rho: float, ref_rho: Optional[float] = None) -> pd.DataFrame:
    """
    Tabulate the merits of several transforms at one correlation.
    
    Args:
        transforms: Name -> transform
        rho: Correlation used for cg, eta and mse
        ref_rho: Correlation of the exact KLT used for mse and epsilon
            (default: rho)
    
    Returns:
        DataFrame with columns name, rho, rho_ref, cg, eta, mse, epsilon
    """
    model = autocorrelation_matrix(rho)
    k_ref = exact_klt(ref_rho if ref_rho is not None else rho, model.n)
    rows = []
    for name, transform in transforms.items():
        report = merit_report(transform, model, k_ref)
        rows.append({
            "name": name,
            "rho": rho,
            "rho_ref": report.rho_ref,
            "cg": report.cg_db,
            "eta": report.eta_pct,
            "mse": report.mse,
            "epsilon": report.epsilon,
        })
    return pd.DataFrame(rows, columns=["name", "rho", "rho_ref", "cg", "eta", "mse", "epsilon"])
