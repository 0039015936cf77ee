"""Configuration management."""

from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="FHLAB_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    # Execution
    threads: int = Field(1, ge=1)
    seed: Optional[int] = None
    tolerance_scale: float = Field(1.0, gt=0.0)

    # Outputs
    out_dir: str = "results"

    # Run ledger; unset disables it
    database_url: Optional[str] = None

    # Logging
    log_level: str = "INFO"


def get_settings() -> Settings:
    return Settings()


settings = get_settings()
