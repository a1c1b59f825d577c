"""Application configuration and settings"""

from pathlib import Path

from pydantic_settings import BaseSettings

# Get project root directory
PROJECT_ROOT = Path(__file__).parent.parent.parent.parent
ENV_FILE = PROJECT_ROOT / ".env"


class Settings(BaseSettings):
    """Process-wide defaults; run files and CLI flags override them per run"""

    # Logging
    LOG_LEVEL: str = "INFO"

    # Parallelism (replicates and folds)
    DEFAULT_WORKERS: int = 1

    # Data ingestion
    MISSING_SENTINEL: str = "NA"

    # Preprocessing
    KNN_NEIGHBORS: int = 10  # median of the 10 nearest donors
    LAMBDA_BOUNDS: float = 5.0  # Box-Cox / Yeo-Johnson search on [-5, 5]
    LAMBDA_TOLERANCE: float = 1e-4

    # CLGBN fitting
    VARIANCE_FLOOR: float = 1e-12
    COLLINEARITY_POLICY: str = "warn"  # "warn" (least-norm) or "raise"

    # Structure search
    DEFAULT_RESTARTS: int = 2
    PERTURBATION_SIZE: int = 5

    # Model averaging
    DEFAULT_REPLICATES: int = 1000
    STRENGTH_THRESHOLD: float = 0.85
    DIRECTION_THRESHOLD: float = 0.7

    # Validation
    DEFAULT_CV_FOLDS: int = 10

    class Config:
        case_sensitive = True
        env_prefix = "HYBRIDBN_"
        env_file = str(ENV_FILE)
        env_file_encoding = "utf-8"
        extra = "ignore"


settings = Settings()
