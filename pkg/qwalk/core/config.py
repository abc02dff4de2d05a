"""
Configuration settings for QWalk Lattice
"""

import os
from pydantic import BaseSettings, Field, validator


class Settings(BaseSettings):
    """Application settings"""

    # Application
    APP_NAME: str = "QWalk Lattice"
    VERSION: str = "1.0.0"
    DEBUG: bool = Field(default=False, env="QWALK_DEBUG")

    # Execution
    THREADS: int = Field(default_factory=lambda: os.cpu_count() or 1, env="QWALK_THREADS")
    OUTPUT_DIR: str = Field(default="results", env="QWALK_OUTPUT_DIR")

    # Simulation
    NOISE_ORDER: str = Field(default="after", env="QWALK_NOISE_ORDER")
    COIN_STATE_TOLERANCE: float = 1e-6
    UNITARITY_TOLERANCE: float = 1e-12
    KRAUS_TOLERANCE: float = 1e-12
    TRACE_TOLERANCE: float = 1e-10

    # Analysis
    UNIFORMITY_THRESHOLD: float = 0.25
    SUPPORT_EPSILON: float = 0.01

    # Output
    CSV_SIGNIFICANT_DIGITS: int = 12
    CSV_INCLUDE_ZERO_ROWS: bool = False

    # Logging
    LOG_LEVEL: str = Field(default="INFO", env="QWALK_LOG_LEVEL")

    @validator("THREADS")
    def _threads_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("QWALK_THREADS must be at least 1")
        return value

    @validator("NOISE_ORDER")
    def _known_noise_order(cls, value: str) -> str:
        value = value.lower()
        if value not in ("after", "before"):
            raise ValueError("QWALK_NOISE_ORDER must be 'after' or 'before'")
        return value

    class Config:
        env_file = ".env"
        case_sensitive = True


# Create global settings instance
settings = Settings()
