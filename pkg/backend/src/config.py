"""Configuration loading: defaults < JSON file < CLI flags, with .env support."""

import json
import logging
import os
from pathlib import Path
from typing import Any

from dotenv import load_dotenv

from src.schemas.config import PipelineConfig

logger = logging.getLogger(__name__)

CONFIG_ENV = "CORROSION_REFINE_CONFIG"
LOG_LEVEL_ENV = "CORROSION_REFINE_LOG_LEVEL"


def load_environment() -> None:
    """Load a .env file from the working directory, if any; real env vars win."""
    load_dotenv(override=False)


def log_level(flag: str | None) -> str:
    return (flag or os.environ.get(LOG_LEVEL_ENV, "") or "INFO").upper()


def read_json(path: Path) -> Any:
    with path.open(encoding="utf-8") as fh:
        return json.load(fh)


def load_pipeline_config(path: Path | None, overrides: dict[str, Any]) -> PipelineConfig:
    """Build a PipelineConfig from an optional JSON file plus explicit overrides.

    *path* falls back to the CORROSION_REFINE_CONFIG environment variable. Override
    entries whose value is None are treated as "not given".
    Raises pydantic.ValidationError for invalid values and OSError if the file is unreadable.
    """
    if path is None and os.environ.get(CONFIG_ENV):
        path = Path(os.environ[CONFIG_ENV])
    data: dict[str, Any] = {}
    if path is not None:
        loaded = read_json(path)
        if not isinstance(loaded, dict):
            raise ValueError(f"config file {path} must hold a JSON object")
        data.update(loaded)
        logger.info("loaded pipeline config from %s", path)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig.model_validate(data)
