"""
ConStyle encoder, its momentum twin and the EMA update between them
"""

import copy
from dataclasses import dataclass, field
from typing import List

import torch
from torch import nn

from irconstyle.constyle.config import ConStyleConfig
from irconstyle.errors import ModelError
from irconstyle.tensor_engine import Activation, Conv2d, Linear, ops


@dataclass
class LatentBundle:
    """Latent code plus the per-scale feature maps that produced it"""

    code: torch.Tensor
    feature_maps: List[torch.Tensor] = field(default_factory=list)

    def zeros_like(self) -> "LatentBundle":
        return LatentBundle(torch.zeros_like(self.code), [torch.zeros_like(m) for m in self.feature_maps])


class _Stage(nn.Module):
    """Stride-2 conv followed by a same-resolution conv"""

    def __init__(self, in_channels: int, out_channels: int, act: Activation):
        super().__init__()
        self.down = Conv2d(in_channels, out_channels, 3, stride=2, padding=1)
        self.conv = Conv2d(out_channels, out_channels, 3)
        self.act = act

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.act(self.conv(self.act(self.down(x))))


class ConStyleEncoder(nn.Module):
    """Several convolutions and an MLP mapping an image to a LatentBundle"""

    def __init__(self, config: ConStyleConfig):
        super().__init__()
        self.config = config
        act = Activation(config.activation, config.negative_slope)
        widths = config.map_widths()

        self.stem = Conv2d(3, config.width, 3)
        stages = []
        in_channels = config.width
        for out_channels in widths:
            stages.append(_Stage(in_channels, out_channels, act))
            in_channels = out_channels
        self.stages = nn.ModuleList(stages)
        self.head_in = Conv2d(widths[-1], config.head_width, 3)
        self.head_out = Conv2d(config.head_width, config.head_width, 3)
        self.mlp_hidden = Linear(config.head_width, config.mlp_hidden)
        self.mlp_out = Linear(config.mlp_hidden, config.latent_dim)
        self.act = act

    @property
    def downscale(self) -> int:
        return 2 ** self.config.stages

    def forward(self, images: torch.Tensor) -> LatentBundle:
        ops.require_divisible(images, self.downscale, "encode")
        if images.shape[1] != 3:
            raise ModelError(f"encode expects RGB input, got shape {tuple(images.shape)}")

        x = self.act(self.stem(images))
        maps = []
        for stage in self.stages:
            x = stage(x)
            maps.append(x)

        x = self.act(self.head_out(self.act(self.head_in(x))))
        pooled = ops.global_avg_pool(x)
        code = self.mlp_out(self.act(self.mlp_hidden(pooled)))
        return LatentBundle(code=ops.l2_normalize(code), feature_maps=maps)


def encode(encoder: ConStyleEncoder, images: torch.Tensor) -> LatentBundle:
    """
    Encode images into a unit-norm code and S intermediate feature maps

    Args:
        encoder: Encoder or momentum encoder
        images: Tensor (B, 3, H, W) with H, W divisible by 2^S

    Returns:
        LatentBundle with code (B, d) and maps at 1/2 ... 1/2^S resolution
    """
    return encoder(images)


def make_momentum_encoder(encoder: ConStyleEncoder) -> ConStyleEncoder:
    """Clone the encoder; the clone never receives gradients"""
    momentum = copy.deepcopy(encoder)
    for p in momentum.parameters():
        p.requires_grad_(False)
    return momentum


@torch.no_grad()
def ema_update(momentum: nn.Module, encoder: nn.Module, m: float) -> None:
    """
    theta_momentum <- m * theta_momentum + (1 - m) * theta_encoder, per parameter

    Args:
        momentum: Momentum encoder, updated in place
        encoder: Source encoder
        m: Momentum in [0, 1)
    """
    if not 0.0 <= m < 1.0:
        raise ModelError(f"ema momentum must be in [0, 1), got {m}")
    target = dict(momentum.named_parameters())
    source = dict(encoder.named_parameters())
    if target.keys() != source.keys():
        missing = sorted(set(target) ^ set(source))
        raise ModelError(f"momentum/encoder parameter names differ: {missing[:5]}")
    for name, p_m in target.items():
        p_e = source[name]
        if p_m.shape != p_e.shape:
            raise ModelError(f"parameter {name}: shape {tuple(p_m.shape)} vs {tuple(p_e.shape)}")
        p_m.copy_(m * p_m + (1.0 - m) * p_e)
