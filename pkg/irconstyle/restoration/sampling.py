"""
Unified down/upsampling: 1x1 conv plus pixel (un)shuffle
"""

import torch
from torch import nn

from irconstyle.errors import DimensionError
from irconstyle.tensor_engine import Conv2d, ops


class Downsample(nn.Module):
    """(N, C, H, W) -> (N, C', H/2, W/2) via 1x1 conv to C'/4 then pixel_unshuffle(2)"""

    def __init__(self, in_channels: int, out_channels: int):
        super().__init__()
        if out_channels % 4:
            raise DimensionError(f"downsample output channels must be divisible by 4, got {out_channels}")
        self.conv = Conv2d(in_channels, out_channels // 4, 1, padding=0, bias=False)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        ops.require_divisible(x, 2, "downsample")
        return ops.pixel_unshuffle(self.conv(x), 2)


class Upsample(nn.Module):
    """(N, C, H, W) -> (N, C'', 2H, 2W) via 1x1 conv to 4C'' then pixel_shuffle(2)"""

    def __init__(self, in_channels: int, out_channels: int):
        super().__init__()
        self.conv = Conv2d(in_channels, out_channels * 4, 1, padding=0, bias=False)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return ops.pixel_shuffle(self.conv(x), 2)


def downsample(module: Downsample, x: torch.Tensor) -> torch.Tensor:
    return module(x)


def upsample(module: Upsample, x: torch.Tensor) -> torch.Tensor:
    return module(x)
