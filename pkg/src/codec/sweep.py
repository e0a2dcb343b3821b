"""Average PSNR/MSSIM curves over an image set and a range of retained coefficients."""
import asyncio
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import pandas as pd

from src.codec.compress import CompressionConfig, compress_detailed
from src.codec.image import GrayImage
from src.codec.quality import mssim, psnr
from src.utils.config import Config
from src.utils.errors import ImageFormatError
from src.utils.logger import log_duration, setup_logger

logger = setup_logger(__name__)

CURVE_COLUMNS = ["transform", "r", "psnr", "mssim", "psnr_float", "images"]


def image_curves(image: GrayImage, transforms: Sequence[str], r_values: Sequence[int]) -> List[Dict]:
    """Quality of one image for every (transform, r) pair."""
    rows = []
    for transform in transforms:
        for r in r_values:
            result = compress_detailed(image, CompressionConfig(transform, r))
            rows.append({
                "transform": transform,
                "r": r,
                "psnr": psnr(image, result.image),
                "mssim": mssim(image, result.image),
                "psnr_float": psnr(image, result.reconstruction),
            })
    return rows


class SweepRunner:
    """Compress every image at every r with every transform and average the metrics."""
    
    def __init__(self, workers: Optional[int] = None):
        self.workers = workers or Config.MAX_WORKERS
        self.stats = {
            'images_done': 0,
            'images_skipped': 0,
        }
        self._stats_lock = asyncio.Lock()
    
    async def run(
        self,
        images: Sequence[Union[str, Path]],
        transforms: Sequence[str],
        r_values: Sequence[int],
    ) -> pd.DataFrame:
        semaphore = asyncio.Semaphore(self.workers)
        
        async def run_image(path) -> List[Dict]:
            async with semaphore:
                try:
                    image = await asyncio.to_thread(GrayImage.load, path)
                    rows = await asyncio.to_thread(image_curves, image, transforms, r_values)
                except ImageFormatError as e:
                    logger.warning(f"Skipping {path}: {e}")
                    async with self._stats_lock:
                        self.stats['images_skipped'] += 1
                    return []
                async with self._stats_lock:
                    self.stats['images_done'] += 1
                return rows
        
        with log_duration(logger, f"Sweep over {len(images)} images"):
            per_image = await asyncio.gather(*(run_image(path) for path in images))
        rows = [row for image_rows in per_image for row in image_rows]
        
        if not rows:
            logger.warning(f"No usable images among {len(images)} inputs; sweep report is empty")
            return pd.DataFrame(columns=CURVE_COLUMNS)
        
        frame = pd.DataFrame(rows)
        curves = (frame.groupby(["transform", "r"], sort=False)
                  .agg(psnr=("psnr", "mean"), mssim=("mssim", "mean"),
                       psnr_float=("psnr_float", "mean"), images=("psnr", "size"))
                  .reset_index())
        logger.info(
            f"Sweep finished: {self.stats['images_done']} images, "
            f"{self.stats['images_skipped']} skipped, {len(curves)} curve points"
        )
        return curves[CURVE_COLUMNS]


def sweep(
    images: Sequence[Union[str, Path]],
    transforms: Sequence[str],
    r_values: Sequence[int] = range(1, 46),
    workers: Optional[int] = None,
) -> pd.DataFrame:
    """
    Mean PSNR and MSSIM per (transform, r) over an image set.
    
    Args:
        images: Image paths; unreadable ones are skipped with a warning
        transforms: Transform specs accepted by CompressionConfig
        r_values: Retained-coefficient counts
        workers: Max images processed concurrently
    
    Returns:
        DataFrame with columns transform, r, psnr, mssim, psnr_float, images
        (psnr is measured on rounded pixels and need not grow with r;
        psnr_float does for orthogonal transforms)
    """
    return asyncio.run(SweepRunner(workers).run(images, transforms, list(r_values)))
