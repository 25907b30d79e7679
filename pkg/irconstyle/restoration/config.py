"""
Restoration network configuration
"""

from typing import List, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class NetConfig(BaseModel):
    """U-Net depth, width and the pluggable block operator"""

    model_config = ConfigDict(extra="forbid")

    width: int = Field(default=16, ge=2)
    levels: int = Field(default=3, ge=1)
    blocks_left: List[int] = Field(default_factory=lambda: [2, 2, 2])
    blocks_bottom: int = Field(default=2, ge=0)
    blocks_right: List[int] = Field(default_factory=lambda: [2, 2, 2])
    block_kind: Literal["residual", "gated"] = "residual"
    activation: Literal["leaky_relu", "gelu"] = "leaky_relu"
    negative_slope: float = 0.2

    @model_validator(mode="after")
    def _consistent(self) -> "NetConfig":
        if len(self.blocks_left) != self.levels or len(self.blocks_right) != self.levels:
            raise ValueError(
                f"blocks_left/blocks_right need {self.levels} entries, "
                f"got {len(self.blocks_left)} and {len(self.blocks_right)}"
            )
        if self.width % 2:
            raise ValueError(f"width must be even for pixel-shuffle bookkeeping, got {self.width}")
        if any(n < 0 for n in self.blocks_left + self.blocks_right):
            raise ValueError("block counts must be non-negative")
        return self

    @property
    def downscale(self) -> int:
        return 2 ** self.levels

    def channels(self, level: int) -> int:
        return self.width * 2 ** level

    @classmethod
    def reference(cls) -> "NetConfig":
        """Full-size construction: width 48, [7, 8, 9] / 9 / [9, 8, 7]"""
        return cls(width=48, levels=3, blocks_left=[7, 8, 9], blocks_bottom=9, blocks_right=[9, 8, 7])
