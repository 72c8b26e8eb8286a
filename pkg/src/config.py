from typing import Optional

from pydantic import BaseSettings, validator

STRATEGY_NAMES = ("lo", "in")
WEIGHTING_NAMES = ("distinct", "multiplicity")


class Settings(BaseSettings):
    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FILE: Optional[str] = None

    # Exploration budgets
    MAX_STEPS: int = 10000
    MAX_NODES: int = 1000

    # Probabilistic semantics
    DEFAULT_STRATEGY: str = "lo"
    PI_WEIGHTING: str = "distinct"

    # Sources
    MAX_SOURCE_SIZE_KB: int = 512
    SOURCE_EXTENSION: str = ".lpl"

    @validator("DEFAULT_STRATEGY")
    def known_strategy(cls, v):
        if v not in STRATEGY_NAMES:
            raise ValueError(f"unknown strategy {v!r}, expected one of {', '.join(STRATEGY_NAMES)}")
        return v

    @validator("PI_WEIGHTING")
    def known_weighting(cls, v):
        if v not in WEIGHTING_NAMES:
            raise ValueError(f"unknown weighting {v!r}, expected one of {', '.join(WEIGHTING_NAMES)}")
        return v

    @validator("MAX_STEPS", "MAX_NODES")
    def non_negative(cls, v):
        if v < 0:
            raise ValueError("budgets cannot be negative")
        return v

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"


# Global settings instance
settings = Settings()
