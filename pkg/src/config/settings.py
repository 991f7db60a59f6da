"""
hardedge Configuration Settings
"""
import os

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings, read from HARDEDGE_* environment variables"""

    model_config = SettingsConfigDict(env_prefix="HARDEDGE_", extra="ignore")

    # Parallel Monte Carlo
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1)
    mc_block_size: int = 500

    # Series and quadrature controls
    hyp_epsilon: float = 1e-16
    hyp_max_terms: int = 1_000_000
    zeta_zero_cutoff: int = 10_000
    quadrature_tolerance: float = 1e-7

    # Application settings
    log_level: str = "WARNING"
    output_format: str = "text"  # text, json, csv

    @field_validator("threads", "mc_block_size", "zeta_zero_cutoff")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be a positive integer")
        return value

    @field_validator("output_format")
    @classmethod
    def _known_format(cls, value: str) -> str:
        if value not in ("text", "json", "csv"):
            raise ValueError(f"unknown output format: {value}")
        return value


# Global settings instance
settings = Settings()
