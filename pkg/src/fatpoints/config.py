"""Configuration management for fatpoints."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from sympy import isprime

# Largest prime below 2**31; products of two residues fit in int64.
DEFAULT_PRIME = 2_147_483_647


class FatpointsConfig(BaseSettings):
    """
    Configuration for dimension computations.

    Values are loaded from (in order of precedence):
    1. Constructor arguments
    2. Environment variables (prefixed with FATPOINTS_)
    3. .env file
    4. Default values
    """

    model_config = SettingsConfigDict(
        env_prefix="FATPOINTS_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Oracle settings
    prime: int = Field(default=DEFAULT_PRIME, description="Field characteristic for rank checks")
    trials: int = Field(default=3, ge=1, description="Random point sets per oracle query")
    seed: int = Field(default=0, ge=0, description="Seed for point sampling")
    oracle_max_degree: int = Field(
        default=60, ge=0, description="Largest degree the oracle will build a matrix for"
    )

    # Cremona settings
    negative_clamp: Literal["oracle", "exceptional"] = Field(
        default="oracle",
        description="How multiplicities <= -2 after a Cremona step are treated",
    )

    # Batch settings
    max_workers: Optional[int] = Field(default=None, ge=1, description="Sweep process count")
    cache_path: Optional[Path] = Field(default=None, description="Default cache file")

    # Provenance
    tool_version: str = Field(default="0.1.0", description="Version recorded in documents")

    # Logging
    log_level: str = Field(default="WARNING", description="Logging level")

    @field_validator("prime")
    @classmethod
    def _check_prime(cls, value: int) -> int:
        if value >= 2**31:
            raise ValueError("prime must be below 2**31")
        if not isprime(value):
            raise ValueError(f"{value} is not prime")
        return value

    def provenance(self) -> dict[str, Any]:
        """Settings recorded alongside traces and cache entries."""
        return {
            "prime": self.prime,
            "seed": self.seed,
            "trials": self.trials,
            "negative_clamp": self.negative_clamp,
            "tool": f"fatpoints {self.tool_version}",
        }
