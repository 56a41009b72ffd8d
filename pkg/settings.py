"""Runtime configuration read from ``PRIME_BAG_*`` environment variables.

Every ceiling and seed the library honours lives here so that results are
reproducible (seeds) and failures are predictable (ceilings). Example:

    PRIME_BAG_WORK_CEILING=100000 PRIME_BAG_RHO_SEED=7 python prime_bag_cli.py convert 8051
"""

from __future__ import annotations

import logging
import os
from functools import lru_cache
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

logger = logging.getLogger(__name__)

ENV_PREFIX = "PRIME_BAG_"
VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseModel):
    """Ceilings, seeds and precision ladder used across the library."""

    model_config = ConfigDict(
        str_strip_whitespace=True,
        extra="forbid",
        frozen=True,
    )

    prime_ceiling: int = Field(
        default=2**32,
        description="The prime sieve never extends past this bound",
        ge=16,
    )
    primality_seed: int = Field(
        default=0,
        description="Seed of the random witness generator for n >= 2**64",
    )
    primality_rounds: int = Field(
        default=64,
        description="Random strong-probable-prime rounds for n >= 2**64",
        ge=64,
        le=4096,
    )
    rho_seed: int = Field(
        default=1,
        description="Seed for Pollard-Brent constants and starting points",
    )
    trial_division_bound: int = Field(
        default=10_000,
        description="Trial-divide by cached primes below this before Pollard-rho",
        ge=3,
        le=10**7,
    )
    work_ceiling: int = Field(
        default=10**7,
        description="Maximum Pollard-rho curve steps for one conversion",
        ge=1,
    )
    enumeration_ceiling: int = Field(
        default=60,
        description="Largest weight accepted by partition enumeration",
        ge=0,
        le=200,
    )
    mulbag_member_cap: int = Field(
        default=2**20,
        description="Largest integer allowed as a MulBag member",
        ge=2,
    )
    ladder_start_bits: int = Field(
        default=64,
        description="First precision rung of the exact comparison ladder",
        ge=16,
    )
    ladder_cap_bits: int = Field(
        default=4096,
        description="Last precision rung before exact integer comparison",
        ge=16,
    )
    log_level: str = Field(
        default="WARNING",
        description="Logging level configured by the CLI and MCP entry points",
    )

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in VALID_LOG_LEVELS:
            raise ValueError(f"log_level must be one of {', '.join(VALID_LOG_LEVELS)}")
        return level


def _env_overrides() -> dict[str, Any]:
    """Collect ``PRIME_BAG_<FIELD>`` variables that name a known field."""
    overrides: dict[str, Any] = {}
    for name in Settings.model_fields:
        raw = os.environ.get(ENV_PREFIX + name.upper())
        if raw is not None and raw.strip():
            overrides[name] = raw.strip()
    return overrides


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the effective settings, defaulting on invalid environment values."""
    overrides = _env_overrides()
    try:
        return Settings(**overrides)
    except ValidationError as exc:
        logger.warning(
            "ignoring invalid %s* settings (%d errors), using defaults: %s",
            ENV_PREFIX,
            exc.error_count(),
            "; ".join(str(e["loc"][0]) for e in exc.errors()),
        )
        return Settings()


def reset_settings() -> None:
    """Forget the memoized settings so the environment is read again."""
    get_settings.cache_clear()


def configure_logging(*, verbose: bool = False) -> None:
    """Send log records to stderr; stdout carries command output / MCP traffic."""
    level = logging.DEBUG if verbose else getattr(logging, get_settings().log_level)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger().setLevel(level)
