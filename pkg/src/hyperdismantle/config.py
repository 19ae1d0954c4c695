"""Configuration models, environment settings and logging setup."""

from __future__ import annotations

import logging
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Tuple

from dotenv import dotenv_values, load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from hyperdismantle.errors import InvalidConfigError

load_dotenv()

DEFAULT_THREADS = int(os.getenv("HYPERDISMANTLE_THREADS", "1"))
DEFAULT_LOG_LEVEL = os.getenv("HYPERDISMANTLE_LOG_LEVEL", "INFO")

LOG_FORMAT = "[%(asctime)s: %(levelname)s/%(processName)s] %(message)s"


class BaseConfig(BaseModel):
    """Frozen model whose validation failures surface as ``InvalidConfigError``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    def __init__(self, **data: Any) -> None:
        try:
            super().__init__(**data)
        except ValidationError as exc:
            raise InvalidConfigError(str(exc)) from exc

    def replace(self, **changes: Any) -> "BaseConfig":
        """Return a validated copy with ``changes`` applied."""
        return type(self)(**{**self.model_dump(), **changes})


class GenConfig(BaseConfig):
    """Synthetic hypernetwork generator settings."""

    n_min: int = Field(default=30, ge=1, description="Smallest node count")
    n_max: int = Field(default=50, ge=1, description="Largest node count")
    p_burn: float = Field(default=0.1, ge=0.0, le=1.0, description="Burning probability")
    p_expand: float = Field(default=0.1, ge=0.0, le=1.0, description="Expanding probability")
    burn_cap: int = Field(default=15, ge=0, description="Most nodes burned by one fire")
    seed: int = Field(default=0, ge=0, lt=2**64, description="Generator seed")

    @model_validator(mode="after")
    def _check_range(self) -> "GenConfig":
        if self.n_min > self.n_max:
            raise ValueError(f"n_min={self.n_min} exceeds n_max={self.n_max}")
        return self


class TrainConfig(BaseConfig):
    """Training-loop settings."""

    gamma: float = Field(default=0.99, ge=0.0, le=1.0, description="Reward discount")
    n_step: int = Field(default=5, ge=1, description="Multi-step length")
    epsilon: float = Field(default=0.05, ge=0.0, le=1.0, description="Exploration probability")
    episodes: int = Field(default=100000, ge=0, description="Maximum episode number")
    target_copy_every: int = Field(default=1000, ge=1, description="Target-network copy frequency")
    warmup: int = Field(default=1000, ge=0, description="Episodes before the first update")
    batch_size: int = Field(default=64, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    alpha: float = Field(default=1.0, ge=0.0, description="Reconstruction-loss weight")
    replay_capacity: int = Field(default=50000, ge=1, description="Experience pool size")
    validation_interval: int = Field(default=50, ge=1)
    validation_size: int = Field(default=50, ge=1)
    validation_batch_frac: float = Field(default=0.01, gt=0.0, le=1.0)
    embed_dim: int = Field(default=64, ge=1)
    layers: int = Field(default=3, ge=0)
    termination: Literal["fully-fragmented", "first-disconnect"] = "fully-fragmented"
    seed: int = Field(default=0, ge=0, lt=2**64)


class SirConfig(BaseConfig):
    """Epidemic-containment settings."""

    beta: float = Field(default=0.1, ge=0.0, le=1.0, description="Per-contact infection probability")
    mu: float = Field(default=0.1, ge=0.0, le=1.0, description="Per-step recovery probability")
    repetitions: int = Field(default=100, ge=1)
    immune_ratios: Tuple[float, ...] = (0.0, 0.05, 0.10, 0.15, 0.20)
    batch_frac: float = Field(default=0.01, gt=0.0, le=1.0, description="Batch size of the immunization ordering")
    max_steps: int = Field(default=100000, ge=1, description="Safety cap on simulated steps")
    seed: int = Field(default=0, ge=0, lt=2**64)

    @field_validator("immune_ratios")
    @classmethod
    def _check_ratios(cls, ratios: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(r < 0.0 or r > 1.0 for r in ratios):
            raise ValueError("immune ratios must lie in [0, 1]")
        if list(ratios) != sorted(ratios):
            raise ValueError("immune ratios must be sorted ascending")
        return ratios


class EvalConfig(BaseConfig):
    """Dismantling-protocol settings shared by ``dismantle`` and ``eval``."""

    strategies: Tuple[str, ...] = ("HD", "HDA", "HHD", "HHDA", "CI")
    batch_frac: float = Field(default=0.01, gt=0.0, le=1.0, description="Share of nodes removed per batch")
    budget: int | None = Field(default=None, ge=1, description="Stop after this many removed nodes")
    ci_radius: int = Field(default=2, ge=1, description="Ball radius of collective influence")
    method: Literal["incremental", "naive"] = "incremental"
    threads: int = Field(default=DEFAULT_THREADS, ge=1, description="Strategies evaluated concurrently")
    seed: int = Field(default=0, ge=0, lt=2**64)

    @field_validator("strategies")
    @classmethod
    def _check_strategies(cls, strategies: Tuple[str, ...]) -> Tuple[str, ...]:
        if not strategies:
            raise ValueError("at least one strategy is required")
        return tuple(s.upper() for s in strategies)


class RunManifest(BaseModel):
    """Everything needed to regenerate one CLI run's outputs."""

    command: str
    config: Dict[str, Any]
    seed: int
    input_digests: Dict[str, str] = Field(default_factory=dict)
    outputs: List[str] = Field(default_factory=list)
    version: str
    started_at: datetime
    finished_at: datetime | None = None


def load_config_file(path: str | Path) -> Dict[str, str]:
    """Read a ``KEY=VALUE`` config file; keys are lower-cased field names."""
    values = dotenv_values(path)
    return {key.lower(): value for key, value in values.items() if value is not None}


def resolve(
    model: type[BaseConfig],
    file_values: Mapping[str, Any],
    flag_values: Mapping[str, Any],
) -> Any:
    """Build ``model`` with precedence flags > config file > defaults.

    Only keys that name a field of ``model`` are taken from either source;
    flags set to None count as not given.
    """
    fields = model.model_fields
    merged: Dict[str, Any] = {k: v for k, v in file_values.items() if k in fields}
    merged.update({k: v for k, v in flag_values.items() if k in fields and v is not None})
    if "immune_ratios" in merged and isinstance(merged["immune_ratios"], str):
        merged["immune_ratios"] = tuple(float(x) for x in merged["immune_ratios"].split(","))
    if "strategies" in merged and isinstance(merged["strategies"], str):
        merged["strategies"] = tuple(s.strip() for s in merged["strategies"].split(",") if s.strip())
    return model(**merged)


def configure_logging(level: str | int = DEFAULT_LOG_LEVEL) -> None:
    """Install one stderr handler with the worker log format."""
    root = logging.getLogger("hyperdismantle")
    root.handlers.clear()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level)
    root.propagate = False
