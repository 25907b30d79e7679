"""
Degradation operators and the seeded `apply` entry point
"""

from abc import ABC, abstractmethod
from typing import Any, List

import torch

from irconstyle.degradations.spec import (
    ComposeSpec,
    GaussianBlurSpec,
    GaussianNoiseSpec,
    parse_degradation,
)
from irconstyle.errors import DomainError
from irconstyle.tensor_engine import ops


class BaseDegradation(ABC):
    """Base class for all degradations of (N, 3, H, W) images in [0, 1]"""

    @abstractmethod
    def __call__(self, clean: torch.Tensor, generator: torch.Generator) -> torch.Tensor:
        """
        Degrade a batch

        Args:
            clean: Images (N, 3, H, W) in [0, 1]
            generator: Seeded random stream; the only source of randomness

        Returns:
            Degraded images of the same shape, in [0, 1]
        """
        pass


class GaussianNoise(BaseDegradation):
    """Adds N(0, (sigma/255)^2) per pixel, then clamps to [0, 1]"""

    def __init__(self, spec: GaussianNoiseSpec):
        self.spec = spec

    def sigmas(self, count: int, generator: torch.Generator, dtype: torch.dtype) -> torch.Tensor:
        """Per-image sigma in 8-bit units; ranges are drawn uniformly per patch"""
        if isinstance(self.spec.sigma, tuple):
            low, high = self.spec.sigma
            draw = torch.rand(count, generator=generator, dtype=torch.float64)
            return (low + (high - low) * draw).to(dtype)
        return torch.full((count,), float(self.spec.sigma), dtype=dtype)

    def noise(self, shape: torch.Size, generator: torch.Generator, dtype: torch.dtype) -> torch.Tensor:
        """Unclamped additive noise for a batch of `shape`"""
        sigma = self.sigmas(shape[0], generator, dtype) / 255.0
        unit = torch.randn(shape, generator=generator, dtype=dtype)
        return unit * sigma.view(-1, 1, 1, 1)

    def __call__(self, clean: torch.Tensor, generator: torch.Generator) -> torch.Tensor:
        noisy = clean + self.noise(clean.shape, generator, clean.dtype)
        return ops.clamp(noisy, 0.0, 1.0)


class GaussianBlur(BaseDegradation):
    """Depthwise convolution with a normalised Gaussian kernel, reflect padding"""

    def __init__(self, spec: GaussianBlurSpec):
        self.spec = spec

    def kernel(self, dtype: torch.dtype) -> torch.Tensor:
        radius = self.spec.kernel // 2
        axis = torch.arange(-radius, radius + 1, dtype=torch.float64)
        profile = torch.exp(-(axis ** 2) / (2.0 * self.spec.sigma ** 2))
        kernel = torch.outer(profile, profile)
        return (kernel / kernel.sum()).to(dtype)

    def __call__(self, clean: torch.Tensor, generator: torch.Generator) -> torch.Tensor:
        n, c, h, w = clean.shape
        planes = clean.reshape(n * c, 1, h, w)
        padded = ops.reflect_pad(planes, self.spec.kernel // 2)
        weight = self.kernel(clean.dtype)[None, None]
        blurred = ops.conv2d(padded, weight, None, stride=1, padding=0)
        return ops.clamp(blurred.reshape(n, c, h, w), 0.0, 1.0)


class Compose(BaseDegradation):
    """Applies its steps in order from one shared random stream"""

    def __init__(self, steps: List[BaseDegradation]):
        self.steps = steps

    def __call__(self, clean: torch.Tensor, generator: torch.Generator) -> torch.Tensor:
        out = clean
        for step in self.steps:
            out = step(out, generator)
        return out


def build_degradation(spec: Any) -> BaseDegradation:
    """Turn a spec (model, dict or sigma shorthand) into an operator"""
    spec = parse_degradation(spec)
    if isinstance(spec, GaussianNoiseSpec):
        return GaussianNoise(spec)
    if isinstance(spec, GaussianBlurSpec):
        return GaussianBlur(spec)
    if isinstance(spec, ComposeSpec):
        return Compose([build_degradation(step) for step in spec.steps])
    raise DomainError(f"unsupported degradation {spec!r}")


@torch.no_grad()
def apply(spec: Any, clean: torch.Tensor, seed: int) -> torch.Tensor:
    """
    Degrade clean images deterministically from `seed`

    Args:
        spec: Degradation spec
        clean: Images (N, 3, H, W) in [0, 1]
        seed: Fully determines the random draws

    Returns:
        Degraded images (N, 3, H, W) in [0, 1]
    """
    ops.require_divisible(clean, 1, "degradation apply")
    if bool((clean < 0).any()) or bool((clean > 1).any()):
        raise DomainError("degradation apply expects clean images in [0, 1]")
    generator = torch.Generator().manual_seed(int(seed))
    return build_degradation(spec)(clean, generator)
