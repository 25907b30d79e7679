"""
Training configuration and its JSON loader
"""

import json
from pathlib import Path
from typing import Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from irconstyle.constyle import ConStyleConfig
from irconstyle.degradations import DegradationSpec, GaussianNoiseSpec
from irconstyle.degradations.spec import error_path
from irconstyle.errors import ConfigError
from irconstyle.restoration import NetConfig


class LossWeights(BaseModel):
    """Weights of the four terms of the total loss (unweighted sum by default)"""

    model_config = ConfigDict(extra="forbid")

    style: float = Field(default=1.0, ge=0.0)
    content: float = Field(default=1.0, ge=0.0)
    infonce: float = Field(default=1.0, ge=0.0)
    l1: float = Field(default=1.0, ge=0.0)


class Ablation(BaseModel):
    """Single-guideline ablation switches"""

    model_config = ConfigDict(extra="forbid")

    g1_small_queue: bool = False
    g2_no_feature_maps: bool = False
    g3_queue_behind_momentum: bool = False


class TrainConfig(BaseModel):
    """All hyperparameters of a training run"""

    model_config = ConfigDict(extra="forbid")

    lr_init: float = Field(default=3e-4, gt=0.0)
    lr_final: float = Field(default=1e-6, ge=0.0)
    betas: Tuple[float, float] = (0.9, 0.999)
    weight_decay: float = Field(default=1e-4, ge=0.0)
    patch: int = Field(default=128, ge=8)
    batch: int = Field(default=4, ge=1)
    total_iters: int = Field(default=2000, ge=1)
    queue_capacity: int = Field(default=65760, ge=1)
    temperature: float = Field(default=0.07, gt=0.0)
    ema_momentum: float = Field(default=0.999, ge=0.0, lt=1.0)
    loss_weights: LossWeights = Field(default_factory=LossWeights)
    ablation: Ablation = Field(default_factory=Ablation)
    seed: int = 0

    net: NetConfig = Field(default_factory=NetConfig)
    constyle: ConStyleConfig = Field(default_factory=ConStyleConfig)
    degradation: DegradationSpec = Field(default_factory=GaussianNoiseSpec)
    infonce_convention: Literal["moco", "literal"] = "moco"
    gram_distance: Literal["mse", "frobenius"] = "mse"
    grad_clip: Optional[float] = Field(default=None, gt=0.0)
    style_clamp: Optional[float] = Field(default=None, gt=0.0)

    train_manifest: Optional[str] = None
    eval_manifest: Optional[str] = None
    output_dir: Optional[str] = None
    checkpoint_every: int = Field(default=500, ge=1)
    log_every: int = Field(default=50, ge=1)

    @model_validator(mode="after")
    def _consistent(self) -> "TrainConfig":
        if not self.lr_final < self.lr_init:
            raise ValueError(f"lr_final ({self.lr_final}) must be below lr_init ({self.lr_init})")
        if self.net.levels != self.constyle.stages:
            raise ValueError(
                f"net.levels ({self.net.levels}) must equal constyle.stages ({self.constyle.stages})"
            )
        if self.patch % self.net.downscale:
            raise ValueError(f"patch {self.patch} must be divisible by {self.net.downscale}")
        return self

    def effective_constyle(self) -> ConStyleConfig:
        """ConStyle settings with the top-level queue/temperature/EMA fields applied"""
        capacity = 16 if self.ablation.g1_small_queue else self.queue_capacity
        return self.constyle.model_copy(update={
            "queue_capacity": capacity,
            "temperature": self.temperature,
            "ema_momentum": self.ema_momentum,
        })

    def to_json(self) -> str:
        return self.model_dump_json()


def parse_config(data: Union[dict, str]) -> TrainConfig:
    """Validate a config given as a dict or JSON text; errors name the field path"""
    try:
        if isinstance(data, str):
            return TrainConfig.model_validate_json(data)
        return TrainConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(exc.errors()[0]["msg"], field=error_path(exc) or "config") from exc


def load_config(path: Union[str, Path]) -> TrainConfig:
    """
    Load a TrainConfig from a JSON file

    Manifest paths are resolved relative to the config file.

    Args:
        path: JSON document mirroring the TrainConfig fields

    Returns:
        Validated configuration
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}", field="config") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc.msg}", field="config") from exc
    config = parse_config(data)
    updates = {}
    for key in ("train_manifest", "eval_manifest"):
        value = getattr(config, key)
        if value is not None and not Path(value).is_absolute():
            updates[key] = str(path.parent / value)
    return config.model_copy(update=updates)
