"""8-bit grayscale images and PGM/raster file I/O."""
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from src.utils.errors import ImageFormatError

# Pillow modes that hold more than 8 bits per sample
_WIDE_MODES = {"I", "I;16", "I;16B", "I;16L", "F"}


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major 8-bit samples, shape (height, width)."""
    pixels: np.ndarray
    
    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 2 or pixels.size == 0:
            raise ImageFormatError(f"grayscale image must be a non-empty 2-D array, got shape {pixels.shape}")
        if pixels.dtype != np.uint8:
            if not np.all(np.equal(np.mod(pixels, 1), 0)) or pixels.min() < 0 or pixels.max() > 255:
                raise ImageFormatError("pixel values must be integers in [0, 255]")
            pixels = pixels.astype(np.uint8)
        pixels = pixels.copy()
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)
    
    @property
    def height(self) -> int:
        return self.pixels.shape[0]
    
    @property
    def width(self) -> int:
        return self.pixels.shape[1]
    
    def __eq__(self, other) -> bool:
        return isinstance(other, GrayImage) and np.array_equal(self.pixels, other.pixels)
    
    @classmethod
    def constant(cls, value: int, height: int, width: int) -> "GrayImage":
        return cls(np.full((height, width), value, dtype=np.uint8))
    
    @classmethod
    def load(cls, path: Union[str, Path]) -> "GrayImage":
        """
        Read a grayscale raster (PGM, PNG, TIFF, BMP, ...).
        
        Colour images are converted to luminance. Images with more than
        8 bits per sample are rejected.
        """
        try:
            with Image.open(path) as img:
                if img.mode in _WIDE_MODES:
                    raise ImageFormatError(f"{path}: {img.mode} images are not 8-bit")
                return cls(np.array(img.convert("L")))
        except (OSError, UnidentifiedImageError) as e:
            raise ImageFormatError(f"cannot read image {path}: {e}") from e
    
    def save(self, path: Union[str, Path]):
        """Write the image; a .pgm suffix produces binary P5 with maxval 255."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        try:
            Image.fromarray(np.ascontiguousarray(self.pixels)).save(path)
        except (OSError, ValueError) as e:
            raise ImageFormatError(f"cannot write image {path}: {e}") from e
