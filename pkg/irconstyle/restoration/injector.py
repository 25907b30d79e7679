"""
Affine injection of ConStyle latent features into U-Net feature maps
"""

import torch
from torch import nn

from irconstyle.errors import DimensionError
from irconstyle.tensor_engine import Conv2d, ops


class AffineInjector(nn.Module):
    """Per-channel scale and shift predicted from a matching-scale feature map"""

    def __init__(self, source_channels: int, target_channels: int):
        super().__init__()
        self.to_scale = Conv2d(source_channels, target_channels, 1, padding=0, zero_init=True)
        self.to_shift = Conv2d(source_channels, target_channels, 1, padding=0, zero_init=True)

    def forward(self, features: torch.Tensor, latent_map: torch.Tensor) -> torch.Tensor:
        return affine_inject(self, features, latent_map)


def affine_inject(injector: AffineInjector, features: torch.Tensor,
                  latent_map: torch.Tensor) -> torch.Tensor:
    """
    F' = (1 + gamma(M)) * F + beta(M)

    Args:
        injector: Injector whose convs produce gamma and beta
        features: U-Net feature map F (N, C, h, w)
        latent_map: ConStyle feature map M (N, C_m, h, w)

    Returns:
        Modulated feature map with the shape of F
    """
    if features.shape[0] != latent_map.shape[0] or features.shape[2:] != latent_map.shape[2:]:
        raise DimensionError(
            f"affine_inject: feature map {tuple(features.shape)} and latent map "
            f"{tuple(latent_map.shape)} are at different scales"
        )
    gamma = injector.to_scale(latent_map)
    beta = injector.to_shift(latent_map)
    return ops.add(ops.add(features, ops.mul(gamma, features)), beta)


class CodeFusion(nn.Module):
    """Fuse the latent code at the bottom: F + conv1x1(concat(F, broadcast(q)))"""

    def __init__(self, channels: int, latent_dim: int):
        super().__init__()
        self.fuse = Conv2d(channels + latent_dim, channels, 1, padding=0, zero_init=True)

    def forward(self, features: torch.Tensor, code: torch.Tensor) -> torch.Tensor:
        if code.shape[0] != features.shape[0]:
            raise DimensionError(f"code {tuple(code.shape)} does not match batch of {tuple(features.shape)}")
        tiled = ops.broadcast_spatial(code.to(features.dtype), features.shape[2], features.shape[3])
        return ops.add(features, self.fuse(ops.concat([features, tiled], axis=1)))
