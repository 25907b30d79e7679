"""
Process blocks for the restoration U-Net

Any operator can fill the Process slot; new kinds subclass BaseBlock and
register themselves in BLOCK_REGISTRY.
"""

from abc import ABC, abstractmethod
from typing import Dict, Type

import torch
from torch import nn

from irconstyle.errors import ConfigError
from irconstyle.tensor_engine import Activation, Conv2d, ops


class BaseBlock(nn.Module, ABC):
    """Base class for channel-preserving process blocks"""

    def __init__(self, channels: int, act: Activation):
        super().__init__()
        self.channels = channels
        self.act = act

    @abstractmethod
    def branch(self, x: torch.Tensor) -> torch.Tensor:
        """
        Residual branch of the block

        Args:
            x: Feature map (N, channels, H, W)

        Returns:
            Tensor of the same shape, added to the input
        """
        pass

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return ops.add(x, self.branch(x))


class ResidualBlock(BaseBlock):
    """Conv3x3 -> activation -> Conv3x3 with identity skip"""

    def __init__(self, channels: int, act: Activation):
        super().__init__(channels, act)
        self.conv1 = Conv2d(channels, channels, 3)
        self.conv2 = Conv2d(channels, channels, 3)

    def branch(self, x: torch.Tensor) -> torch.Tensor:
        return self.conv2(self.act(self.conv1(x)))


class GatedBlock(BaseBlock):
    """Residual block whose branch is scaled by a sigmoid gate from a 1x1 conv"""

    def __init__(self, channels: int, act: Activation):
        super().__init__(channels, act)
        self.conv1 = Conv2d(channels, channels, 3)
        self.conv2 = Conv2d(channels, channels, 3)
        self.gate = Conv2d(channels, channels, 1)

    def branch(self, x: torch.Tensor) -> torch.Tensor:
        update = self.conv2(self.act(self.conv1(x)))
        return ops.mul(update, ops.sigmoid(self.gate(x)))


BLOCK_REGISTRY: Dict[str, Type[BaseBlock]] = {
    "residual": ResidualBlock,
    "gated": GatedBlock,
}


def make_stack(kind: str, channels: int, count: int, act: Activation) -> nn.Sequential:
    """`count` blocks of `kind`; an empty stack is the identity"""
    if kind not in BLOCK_REGISTRY:
        raise ConfigError(f"unknown block kind {kind!r}", field="net.block_kind")
    return nn.Sequential(*[BLOCK_REGISTRY[kind](channels, act) for _ in range(count)])
