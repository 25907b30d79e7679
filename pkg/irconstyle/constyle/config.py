"""
ConStyle hyperparameters
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class ConStyleConfig(BaseModel):
    """Sizes of the siamese encoders and settings of the contrastive side"""

    model_config = ConfigDict(extra="forbid")

    width: int = Field(default=16, ge=1)
    stages: int = Field(default=3, ge=1)
    latent_dim: int = Field(default=128, ge=1)
    head_width: int = Field(default=256, ge=1)
    mlp_hidden: int = Field(default=1024, ge=1)
    activation: Literal["leaky_relu", "gelu"] = "leaky_relu"
    negative_slope: float = 0.2
    queue_capacity: int = Field(default=65760, ge=1)
    temperature: float = Field(default=0.07, gt=0.0)
    ema_momentum: float = Field(default=0.999, ge=0.0, lt=1.0)

    def map_widths(self) -> list:
        return [self.width * 2 ** i for i in range(self.stages)]
