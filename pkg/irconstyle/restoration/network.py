"""
General U-Net restoration network with ConStyle latent-feature injection
"""

import logging
from typing import Dict, List, Optional

import torch
from torch import nn

from irconstyle.constyle import ConStyleConfig, LatentBundle
from irconstyle.errors import ConfigError, DimensionError
from irconstyle.restoration.blocks import make_stack
from irconstyle.restoration.config import NetConfig
from irconstyle.restoration.injector import AffineInjector, CodeFusion
from irconstyle.restoration.sampling import Downsample, Upsample
from irconstyle.tensor_engine import Activation, Conv2d, count_parameters, ops, seeded

logger = logging.getLogger(__name__)


class RestorationNet(nn.Module):
    """
    Preprocess -> [Process + DC] x levels -> bottom -> [UC + Process] x levels -> Finetune

    Map i of the latent bundle modulates the output of the i-th downsample,
    which lives at the same 1/2^(i+1) resolution. The latent code is fused at
    the bottom. The finetune output is added to the degraded input.
    """

    def __init__(self, config: NetConfig, constyle: Optional[ConStyleConfig] = None):
        super().__init__()
        constyle = constyle or ConStyleConfig(stages=config.levels)
        if constyle.stages != config.levels:
            raise ConfigError(
                f"ConStyle has {constyle.stages} stages but the U-Net has {config.levels} levels",
                field="net.levels",
            )
        self.config = config
        act = Activation(config.activation, config.negative_slope)
        map_widths = constyle.map_widths()

        self.preprocess = Conv2d(3, config.width, 3)
        self.left = nn.ModuleList()
        self.down = nn.ModuleList()
        self.injectors = nn.ModuleList()
        for level in range(config.levels):
            channels = config.channels(level)
            self.left.append(make_stack(config.block_kind, channels, config.blocks_left[level], act))
            self.down.append(Downsample(channels, config.channels(level + 1)))
            self.injectors.append(AffineInjector(map_widths[level], config.channels(level + 1)))

        bottom_channels = config.channels(config.levels)
        self.code_fusion = CodeFusion(bottom_channels, constyle.latent_dim)
        self.bottom = make_stack(config.block_kind, bottom_channels, config.blocks_bottom, act)

        self.up = nn.ModuleList()
        self.reduce = nn.ModuleList()
        self.right = nn.ModuleList()
        for level in range(config.levels):
            channels = config.channels(level)
            self.up.append(Upsample(config.channels(level + 1), channels))
            self.reduce.append(Conv2d(2 * channels, channels, 1, padding=0))
            # blocks_right is listed from the bottom level upwards
            count = config.blocks_right[config.levels - 1 - level]
            self.right.append(make_stack(config.block_kind, channels, count, act))

        self.finetune = Conv2d(config.width, 3, 3)

    def forward(self, degraded: torch.Tensor, bundle: Optional[LatentBundle] = None,
                inject: bool = True) -> torch.Tensor:
        ops.require_divisible(degraded, self.config.downscale, "restoration forward")
        if inject:
            if bundle is None:
                raise DimensionError("restoration forward: inject=True needs a latent bundle")
            if len(bundle.feature_maps) != self.config.levels:
                raise DimensionError(
                    f"bundle has {len(bundle.feature_maps)} feature maps, net has {self.config.levels} levels"
                )

        x = self.preprocess(degraded)
        skips: List[torch.Tensor] = []
        for level in range(self.config.levels):
            x = self.left[level](x)
            skips.append(x)
            x = self.down[level](x)
            if inject:
                x = self.injectors[level](x, bundle.feature_maps[level].to(x.dtype))

        if inject:
            x = self.code_fusion(x, bundle.code)
        x = self.bottom(x)

        for level in reversed(range(self.config.levels)):
            x = self.up[level](x)
            x = self.reduce[level](ops.concat([x, skips[level]], axis=1))
            x = self.right[level](x)

        return ops.add(self.finetune(x), degraded)

    def parameter_report(self) -> Dict[str, int]:
        injection = count_parameters(self.injectors) + count_parameters(self.code_fusion)
        return {"restoration": count_parameters(self) - injection, "injectors": injection}


def build(config: NetConfig, constyle: Optional[ConStyleConfig] = None, seed: int = 0) -> RestorationNet:
    """
    Construct a restoration network with seed-determined initial parameters

    Args:
        config: U-Net configuration
        constyle: ConStyle sizes the injectors must match (defaults when None)
        seed: Initialisation seed

    Returns:
        Freshly initialised network
    """
    with seeded(seed):
        net = RestorationNet(config, constyle)
    logger.debug("built restoration net: %s", net.parameter_report())
    return net


def forward(net: RestorationNet, degraded: torch.Tensor, bundle: Optional[LatentBundle],
            inject: bool = True) -> torch.Tensor:
    """restored = net(degraded, bundle) + degraded; inject=False ignores the bundle entirely"""
    return net(degraded, bundle, inject=inject)
