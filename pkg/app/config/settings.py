"""
Application configuration settings
Loads environment variables (prefix SUBPIX_) and the optional .env file
"""

import math
from typing import List, Literal, Optional

from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables from .env file
load_dotenv()


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables"""
    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="SUBPIX_",
        case_sensitive=False,
        extra="ignore",
    )

    # Application Settings
    app_name: str = "Subpixel Edge Localization Toolkit"
    app_version: str = "1.0.0"
    debug: bool = False
    api_version: str = "v1"

    # Server Configuration
    host: str = "0.0.0.0"
    port: int = 8000
    cors_origins: List[str] = ["*"]

    # Sentry Configuration (Optional - only DSN from .env)
    sentry_dsn: Optional[str] = None

    # Edge detection (pre-processing)
    th_l: float = 80.0
    th_h: float = 100.0
    n_p: int = 7
    flat_tol: float = 5.0
    drop_clamped: bool = True

    # Stable edge region
    th_m: float = 5.0
    th_theta: float = math.pi / 40
    th_ev: float = 10.0
    th_r: float = 0.1
    th_plateau: float = 0.5
    plateau_max: int = 3
    k_max: int = 20
    spread: Literal["std", "variance"] = "std"
    stability_reduce: Literal["min", "max"] = "min"
    pair_limit: int = 1_000_000
    subsample_size: int = 1000

    # Edge complement
    th_c: float = 10.0

    # Synthetic datasets
    blur_sigma_ratio: float = 1.0 / 6.0
    area_samples: int = 16
    quantize: bool = True
    quad_tolerance: float = 1e-6

    # Benchmark
    samples: int = 5
    workers: int = 1
    rmse_pooling: Literal["pooled", "per_image"] = "pooled"

    # Overrides --seed on the command line when set (SUBPIX_SEED)
    seed: Optional[int] = None


# Create settings instance
settings = Settings()
