"""Shared fixtures."""
import os
import tempfile
from pathlib import Path

# Keep test runs out of the working log file
os.environ.setdefault("LOG_FILE", str(Path(tempfile.gettempdir()) / "klt_approx_tests.log"))

import numpy as np
import pytest

from src.codec.image import GrayImage
from src.metrics.merit import MeritReport
from src.search.optimizer import ShortlistEntry

# Published shortlist: (id, rho of interval upper end, cg, eta, mse, epsilon)
PUBLISHED_SHORTLIST = [
    ("K1", 0.1, 0.0308, 93.4298, 0.0608, 1.5331),
    ("K2", 0.1, 0.1325, 79.5971, 0.0128, 0.3173),
    ("K3", 0.1, 0.0588, 88.3104, 0.0036, 0.0930),
    ("K4", 0.2, 0.1754, 83.7756, 0.0094, 0.2265),
    ("K5", 0.3, 0.3461, 80.8238, 0.0132, 0.2999),
    ("K6", 0.4, 0.6725, 83.0728, 0.0095, 0.3104),
    ("K7", 0.4, 0.7618, 63.7120, 0.0785, 2.1348),
    ("K8", 0.4, 0.6532, 83.3729, 0.0115, 0.2823),
    ("K9", 0.5, 1.1063, 87.2737, 0.0094, 0.3487),
    ("K10", 0.5, 1.1530, 77.5984, 0.0163, 0.6439),
    ("K11", 0.6, 1.7572, 82.7462, 0.0197, 0.9273),
    ("K12", 0.6, 1.6743, 86.4929, 0.0089, 0.2750),
    ("K13", 0.7, 2.5736, 84.7636, 0.0153, 0.7505),
    ("K14", 0.7, 2.5308, 89.7579, 0.0065, 0.2299),
    ("K15", 0.8, 3.8534, 84.1782, 0.0087, 0.6043),
    ("K16", 0.8, 3.8484, 87.7103, 0.0043, 0.2418),
    ("K17", 0.8, 3.8146, 86.6308, 0.0049, 0.1884),
    ("K18", 0.9, 6.2462, 88.1734, 0.0102, 0.6746),
    ("K19", 0.9, 6.1727, 85.8301, 0.0055, 0.1948),
    ("K20", 0.9, 6.2335, 86.8270, 0.0050, 0.4439),
]


@pytest.fixture
def published_shortlist():
    """Shortlist entries carrying the published merit values."""
    return [
        ShortlistEntry(id=tid, rho=rho, merits=MeritReport(cg, eta, mse, eps, rho))
        for tid, rho, cg, eta, mse, eps in PUBLISHED_SHORTLIST
    ]


def make_smooth_image(height: int = 64, width: int = 64, seed: int = 7) -> GrayImage:
    """Deterministic natural-looking test image: gradients, texture and mild noise."""
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:height, 0:width].astype(float)
    base = 110 + 60 * np.sin(x / 9.0) * np.cos(y / 13.0) + 0.6 * x - 0.3 * y
    base += 25 * np.sin((x + 2 * y) / 4.0)
    base += rng.normal(0, 4, size=base.shape)
    return GrayImage(np.clip(np.round(base), 0, 255).astype(np.uint8))


@pytest.fixture
def smooth_image():
    return make_smooth_image()


@pytest.fixture
def reference_image_dir():
    """Directory with the standard test images; tests needing it skip otherwise."""
    path = os.getenv("KLT_TEST_IMAGE_DIR")
    if not path or not Path(path).is_dir():
        pytest.skip("KLT_TEST_IMAGE_DIR not set")
    return Path(path)


def find_image(directory: Path, stem: str) -> Path:
    for candidate in sorted(directory.iterdir()):
        if candidate.stem.lower().startswith(stem):
            return candidate
    pytest.skip(f"no {stem} image in {directory}")
