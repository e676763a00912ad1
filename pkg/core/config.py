"""
core/config.py
Solver settings loaded from the environment (and a local .env file).
"""
import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError as PydanticValidationError

from utils.validators import ValidationError

load_dotenv()

ENV_PREFIX = "RAMSEY_"


class SolverSettings(BaseModel):
    riccati_tol: float = Field(1e-12, gt=0)
    max_iter: int = Field(100000, ge=1)
    damping: float = Field(1.0, gt=0, le=1)
    rank_tol: float = Field(1e-10, gt=0)
    psd_tol: float = Field(1e-10, gt=0)
    rcond_tol: float = Field(1e-12, gt=0)
    mirror_tol: float = Field(1e-8, gt=0)
    horizon: int = Field(200, ge=0)
    log_level: str = "INFO"

    @classmethod
    def from_env(cls) -> "SolverSettings":
        values = {}
        for name in cls.model_fields:
            raw = os.getenv(f"{ENV_PREFIX}{name.upper()}")
            if raw is not None and raw.strip():
                values[name] = raw.strip()
        try:
            return cls(**values)
        except PydanticValidationError as e:
            raise ValidationError(f"Invalid solver settings in environment: {e}")


_settings: Optional[SolverSettings] = None


def get_settings() -> SolverSettings:
    global _settings
    if _settings is None:
        _settings = SolverSettings.from_env()
    return _settings


def reset_settings() -> None:
    global _settings
    _settings = None
