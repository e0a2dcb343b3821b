"""Block transform compression with zig-zag coefficient truncation."""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.codec.image import GrayImage
from src.fast.transforms import resolve_transform
from src.metrics.merit import invert
from src.utils.errors import ImageFormatError, KLTError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

BLOCK = 8


def zigzag_indices(n: int = BLOCK) -> List[Tuple[int, int]]:
    """Standard JPEG zig-zag scan: (0,0), (0,1), (1,0), (2,0), (1,1), (0,2), ..."""
    if n != BLOCK:
        raise KLTError(f"zig-zag scan is defined for {BLOCK}x{BLOCK} blocks, got n={n}")
    cells = [(i, j) for i in range(n) for j in range(n)]
    # Odd anti-diagonals run down-left, even ones up-right
    return sorted(cells, key=lambda c: (c[0] + c[1], c[0] if (c[0] + c[1]) % 2 else -c[0]))


def retention_mask(r: int) -> np.ndarray:
    """Boolean 8x8 mask keeping the first r zig-zag coefficients."""
    mask = np.zeros((BLOCK, BLOCK), dtype=bool)
    for i, j in zigzag_indices()[:r]:
        mask[i, j] = True
    return mask


@dataclass(frozen=True)
class CompressionConfig:
    """Transform spec (T1..T18, "klt:<rho>" or "dct") and retained coefficients."""
    transform: str
    r: int
    
    def __post_init__(self):
        if not 1 <= int(self.r) <= BLOCK * BLOCK:
            raise KLTError(f"retained coefficients r must be in [1, {BLOCK * BLOCK}], got {self.r}")
        resolve_transform(self.transform)
    
    @property
    def compression_ratio(self) -> float:
        return (BLOCK * BLOCK - self.r) / (BLOCK * BLOCK)
    
    @property
    def matrix(self) -> np.ndarray:
        return resolve_transform(self.transform)[0]
    
    @property
    def orthogonal(self) -> bool:
        return resolve_transform(self.transform)[1]


def to_blocks(pixels: np.ndarray) -> np.ndarray:
    """(h, w) -> (h*w/64, 8, 8) in raster block order."""
    h, w = pixels.shape
    return (pixels.reshape(h // BLOCK, BLOCK, -1, BLOCK)
            .swapaxes(1, 2)
            .reshape(-1, BLOCK, BLOCK))


def from_blocks(blocks: np.ndarray, h: int, w: int) -> np.ndarray:
    return (blocks.reshape(h // BLOCK, -1, BLOCK, BLOCK)
            .swapaxes(1, 2)
            .reshape(h, w))


def forward_2d(blocks: np.ndarray, k: np.ndarray) -> np.ndarray:
    """B = K A K^T for every block."""
    return k @ blocks @ k.T


def inverse_2d(coefficients: np.ndarray, k_inv: np.ndarray) -> np.ndarray:
    """A = K^-1 B K^-T for every block."""
    return k_inv @ coefficients @ k_inv.T


def round_pixels(values: np.ndarray) -> np.ndarray:
    """Round half away from zero, then clamp to [0, 255]."""
    rounded = np.sign(values) * np.floor(np.abs(values) + 0.5)
    return np.clip(rounded, 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class CompressionResult:
    image: GrayImage
    # Reconstruction before rounding and clamping
    reconstruction: np.ndarray


def compress_detailed(image: GrayImage, cfg: CompressionConfig) -> CompressionResult:
    """
    Transform, truncate and reconstruct every 8x8 block.
    
    Non-orthogonal transforms are inverted with the true inverse, never the
    transpose.
    
    Raises:
        ImageFormatError: width or height is not a multiple of 8
        SingularTransformError: the transform is not invertible
    """
    h, w = image.height, image.width
    if h % BLOCK or w % BLOCK:
        raise ImageFormatError(f"image dimensions {w}x{h} are not multiples of {BLOCK}")
    
    k = cfg.matrix
    k_inv = invert(k)
    blocks = to_blocks(image.pixels.astype(float))
    coefficients = forward_2d(blocks, k) * retention_mask(cfg.r)
    reconstruction = from_blocks(inverse_2d(coefficients, k_inv), h, w)
    
    logger.debug(f"compressed {w}x{h} image with {cfg.transform}, r={cfg.r}")
    return CompressionResult(image=GrayImage(round_pixels(reconstruction)), reconstruction=reconstruction)


def compress(image: GrayImage, cfg: CompressionConfig) -> GrayImage:
    """Compressed and reconstructed 8-bit image."""
    return compress_detailed(image, cfg).image
