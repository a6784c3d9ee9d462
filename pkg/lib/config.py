"""
Configuration - Environment-driven settings for the Hochschild engine
"""

import os
import logging

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

load_dotenv()

logger = logging.getLogger(__name__)

_TRUTHY = {"1", "true", "yes", "on"}


class HochschildSettings(BaseModel):
    """Tunable knobs; every field has a safe desk-scale default"""

    workers: int = Field(default=1, ge=1)
    bar_max_dimension: int = Field(default=200_000, ge=1)
    cache_enabled: bool = True
    cache_max_entries: int = Field(default=512, ge=1)
    log_level: str = "INFO"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"unknown log level {value!r}")
        return level


def _env_bool(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in _TRUTHY


def load_settings() -> HochschildSettings:
    """Read HH_* variables from the environment (and .env, loaded at import)"""
    settings = HochschildSettings(
        workers=int(os.getenv("HH_WORKERS", "1")),
        bar_max_dimension=int(os.getenv("HH_BAR_MAX_DIMENSION", "200000")),
        cache_enabled=_env_bool("HH_CACHE_ENABLED", True),
        cache_max_entries=int(os.getenv("HH_CACHE_MAX_ENTRIES", "512")),
        log_level=os.getenv("HH_LOG_LEVEL", "INFO"),
    )
    logger.debug(f"Loaded settings: {settings.model_dump()}")
    return settings


# Global settings
settings = load_settings()
