"""
Synthetic degradations and paired patch sampling
"""

from .base import BaseDegradation, Compose, GaussianBlur, GaussianNoise, apply, build_degradation
from .image_io import read_manifest, read_png, write_manifest, write_png
from .sampler import PatchSampler
from .spec import (
    ComposeSpec,
    DegradationSpec,
    GaussianBlurSpec,
    GaussianNoiseSpec,
    parse_degradation,
    parse_sigma,
)
from .synthetic import synth_image, write_corpus

__all__ = [
    'BaseDegradation',
    'Compose',
    'ComposeSpec',
    'DegradationSpec',
    'GaussianBlur',
    'GaussianBlurSpec',
    'GaussianNoise',
    'GaussianNoiseSpec',
    'PatchSampler',
    'apply',
    'build_degradation',
    'parse_degradation',
    'parse_sigma',
    'read_manifest',
    'read_png',
    'synth_image',
    'write_corpus',
    'write_manifest',
    'write_png',
]
