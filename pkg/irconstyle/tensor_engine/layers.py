"""
Parameter-holding layers built on the engine operators
"""

import math
from contextlib import contextmanager
from typing import Dict, Iterator, Optional

import torch
from torch import nn

from irconstyle.errors import ModelError
from irconstyle.tensor_engine import ops

Parameter = nn.Parameter


class Conv2d(nn.Module):
    """Square-kernel convolution whose forward goes through ops.conv2d"""

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int = 3,
                 stride: int = 1, padding: Optional[int] = None, bias: bool = True,
                 zero_init: bool = False):
        super().__init__()
        self.stride = stride
        self.padding = kernel_size // 2 if padding is None else padding
        self.weight = Parameter(torch.empty(out_channels, in_channels, kernel_size, kernel_size))
        self.bias = Parameter(torch.empty(out_channels)) if bias else None
        self.reset_parameters(zero_init)

    def reset_parameters(self, zero_init: bool = False) -> None:
        if zero_init:
            nn.init.zeros_(self.weight)
            if self.bias is not None:
                nn.init.zeros_(self.bias)
            return
        # Same scheme torch uses for nn.Conv2d
        nn.init.kaiming_uniform_(self.weight, a=math.sqrt(5))
        if self.bias is not None:
            fan_in = self.weight.shape[1] * self.weight.shape[2] * self.weight.shape[3]
            bound = 1.0 / math.sqrt(fan_in)
            nn.init.uniform_(self.bias, -bound, bound)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return ops.conv2d(x, self.weight, self.bias, stride=self.stride, padding=self.padding)


class Linear(nn.Module):
    """Dense layer whose forward goes through ops.linear"""

    def __init__(self, in_features: int, out_features: int):
        super().__init__()
        self.weight = Parameter(torch.empty(out_features, in_features))
        self.bias = Parameter(torch.empty(out_features))
        nn.init.kaiming_uniform_(self.weight, a=math.sqrt(5))
        bound = 1.0 / math.sqrt(in_features)
        nn.init.uniform_(self.bias, -bound, bound)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return ops.linear(x, self.weight, self.bias)


class Activation(nn.Module):
    """Named activation; leaky_relu(0.2) unless configured otherwise"""

    def __init__(self, kind: str = "leaky_relu", negative_slope: float = 0.2):
        super().__init__()
        if kind not in ("leaky_relu", "gelu"):
            raise ModelError(f"unknown activation {kind!r}")
        self.kind = kind
        self.negative_slope = negative_slope

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if self.kind == "gelu":
            return ops.gelu(x)
        return ops.leaky_relu(x, self.negative_slope)


def named_parameters(module: nn.Module) -> Dict[str, Parameter]:
    """Name -> parameter map; names are unique by construction in torch"""
    return dict(module.named_parameters())


def count_parameters(module: nn.Module) -> int:
    return sum(p.numel() for p in module.parameters())


def zero_grad(module: nn.Module) -> None:
    for p in module.parameters():
        p.grad = None


@contextmanager
def seeded(seed: int) -> Iterator[None]:
    """Run a block under a fixed torch seed without disturbing the global stream"""
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        yield
