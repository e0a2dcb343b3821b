"""Configuration management with environment variables."""
import os
from typing import List
from dotenv import load_dotenv
import logging

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

INT_FUNCTIONS = ("floor", "ceil", "trunc", "round_afz", "round")
MERITS = ("cg", "eta", "mse", "epsilon")


def _csv_list(value: str) -> List[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


class Config:
    """Application configuration."""
    
    # Search grid
    RHO_STEP: float = float(os.getenv("RHO_STEP", "0.1"))
    ALPHA_STEP: float = float(os.getenv("ALPHA_STEP", "0.01"))
    SEARCH_FUNCS: List[str] = _csv_list(os.getenv("SEARCH_FUNCS", "floor,ceil,trunc,round"))
    SEARCH_MERITS: List[str] = _csv_list(os.getenv("MERITS", ",".join(MERITS)))
    
    # Clustering
    KMEANS_CLUSTERS: int = int(os.getenv("KMEANS_CLUSTERS", "2"))
    KMEANS_RESTARTS: int = int(os.getenv("KMEANS_RESTARTS", "32"))
    SEED: int = int(os.getenv("SEED", "2024"))
    
    # Parallelism (max concurrent slices)
    MAX_WORKERS: int = int(os.getenv("MAX_WORKERS", str(os.cpu_count() or 1)))
    
    # Fast transform datapath
    WORD_BITS: int = int(os.getenv("WORD_BITS", "16"))
    
    # Codec
    CODEC_RETAINED: int = int(os.getenv("CODEC_RETAINED", "10"))
    SWEEP_MAX_R: int = int(os.getenv("SWEEP_MAX_R", "45"))
    
    # Logging
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE: str = os.getenv("LOG_FILE", "logs/klt_approx.log")
    
    @classmethod
    def validate(cls) -> bool:
        """
        Validate configuration.
        
        Returns:
            True if configuration is valid, False otherwise
        """
