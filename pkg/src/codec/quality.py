"""PSNR and mean SSIM between two grayscale images."""
import math
from dataclasses import dataclass
from typing import Dict, Optional, Union

import numpy as np
from skimage.metrics import peak_signal_noise_ratio, structural_similarity

from src.codec.image import GrayImage
from src.utils.errors import DimensionMismatchError, ImageFormatError

DATA_RANGE = 255.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03

ImageLike = Union[GrayImage, np.ndarray]


@dataclass(frozen=True)
class QualityReport:
    """Pixel-domain metrics are the headline; float-domain ones are optional."""
    psnr_db: float
    mssim: float
    psnr_float_db: Optional[float] = None
    mssim_float: Optional[float] = None
    
    def to_dict(self) -> Dict:
        def encode(value):
            # JSON has no infinity; identical images report the string "inf"
            return "inf" if value is not None and math.isinf(value) else value
        return {
            "psnr_db": encode(self.psnr_db),
            "mssim": self.mssim,
            "psnr_float_db": encode(self.psnr_float_db),
            "mssim_float": self.mssim_float,
        }


def _pair(a: ImageLike, b: ImageLike):
    x = np.asarray(a.pixels if isinstance(a, GrayImage) else a, dtype=float)
    y = np.asarray(b.pixels if isinstance(b, GrayImage) else b, dtype=float)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"image shapes differ: {x.shape} vs {y.shape}")
    return x, y


def psnr(a: ImageLike, b: ImageLike) -> float:
    """10 log10(255^2 / MSE) in dB; identical images give math.inf."""
    x, y = _pair(a, b)
    if np.array_equal(x, y):
        return math.inf
    return float(peak_signal_noise_ratio(x, y, data_range=DATA_RANGE))


def mssim(a: ImageLike, b: ImageLike) -> float:
    """
    Mean SSIM over an 11x11 Gaussian window (sigma 1.5, K1 0.01, K2 0.03, L 255).
    
    Raises:
        ImageFormatError: either side is smaller than the window
    """
    x, y = _pair(a, b)
    if min(x.shape) < SSIM_WINDOW:
        raise ImageFormatError(f"image {x.shape} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window")
    if np.array_equal(x, y):
        return 1.0
    return float(structural_similarity(
        x, y,
        data_range=DATA_RANGE,
        gaussian_weights=True,
        sigma=SSIM_SIGMA,
        use_sample_covariance=False,
        K1=SSIM_K1,
        K2=SSIM_K2,
    ))


def quality_report(original: GrayImage, reconstructed: GrayImage, reconstruction: Optional[np.ndarray] = None) -> QualityReport:
    """Pixel-domain metrics, plus float-domain ones when the unrounded reconstruction is given."""
    report = QualityReport(psnr_db=psnr(original, reconstructed), mssim=mssim(original, reconstructed))
    if reconstruction is None:
        return report
    return QualityReport(
        psnr_db=report.psnr_db,
        mssim=report.mssim,
        psnr_float_db=psnr(original, reconstruction),
        mssim_float=mssim(original, reconstruction),
    )
