import json
import logging
from collections.abc import Mapping
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, ValidationError, field_validator

from core import UsageError

ENV_PREFIX = "SAIBENCH_"


class CliConfig(BaseModel):
    """Settings shared by every subcommand."""

    output_dir: str = Field(default="out", description="Root directory for everything a command writes")
    workers: int = Field(default=1, ge=1, description="Concurrent sweep cells")
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "WARNING"
    format: Literal["text", "json"] = "text"
    predictor_timeout_s: float = Field(default=30.0, gt=0, description="Per-response timeout for external predictors")
    seed: int | None = Field(default=None, ge=0, description="Seed for generators and random draws")

    @field_validator("log_level", mode="before")
    @classmethod
    def normalize_log_level(cls, v):
        return v.upper() if isinstance(v, str) else v


class State:
    """Resolved configuration for one command invocation.

    Layering, highest first: command-line flags, SAIBENCH_* environment
    variables, the JSON file given with --config, then defaults.
    """

    def __init__(self, config: CliConfig):
        self.config = config

    @classmethod
    def resolve(
        cls,
        flags: Mapping[str, Any],
        env: Mapping[str, str],
        config_path: str | None = None,
    ) -> "State":
        layered: dict[str, Any] = {}
        if config_path:
            layered.update(cls._load_config_file(Path(config_path)))
        for name in CliConfig.model_fields:
            value = env.get(f"{ENV_PREFIX}{name.upper()}")
            if value is not None:
                layered[name] = value
        layered.update({k: v for k, v in flags.items() if v is not None})
        try:
            config = CliConfig(**layered)
        except ValidationError as e:
            raise UsageError(f"Invalid configuration: {e}") from e
        return cls(config)

    @staticmethod
    def _load_config_file(path: Path) -> dict[str, Any]:
        try:
            with open(path, encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError as e:
            raise UsageError(f"Config file not found: {path}") from e
        except json.JSONDecodeError as e:
            raise UsageError(f"Config file {path} is not valid JSON: {e.msg}") from e
        if not isinstance(data, dict):
            raise UsageError(f"Config file {path} must contain a JSON object")
        return data

    @property
    def seed(self) -> int | None:
        return self.config.seed

    @property
    def output_dir(self) -> Path:
        return Path(self.config.output_dir)

    @property
    def json_output(self) -> bool:
        return self.config.format == "json"

    def configure_logging(self) -> None:
        logging.basicConfig(level=getattr(logging, self.config.log_level), format="%(message)s", force=True)
