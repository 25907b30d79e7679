"""
General U-Net restoration network
"""

from .blocks import BLOCK_REGISTRY, BaseBlock, GatedBlock, ResidualBlock
from .config import NetConfig
from .injector import AffineInjector, CodeFusion, affine_inject
from .network import RestorationNet, build, forward
from .sampling import Downsample, Upsample, downsample, upsample

__all__ = [
    'AffineInjector',
    'BLOCK_REGISTRY',
    'BaseBlock',
    'CodeFusion',
    'Downsample',
    'GatedBlock',
    'NetConfig',
    'ResidualBlock',
    'RestorationNet',
    'Upsample',
    'affine_inject',
    'build',
    'downsample',
    'forward',
    'upsample',
]
