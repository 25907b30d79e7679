"""
Tensor engine: shape-checked differentiable operators on a torch substrate
"""

from . import ops
from .gradcheck import grad_check
from .layers import (
    Activation,
    Conv2d,
    Linear,
    Parameter,
    count_parameters,
    named_parameters,
    seeded,
    zero_grad,
)
from .ops import Tensor, backward

__all__ = [
    'ops',
    'Tensor',
    'Parameter',
    'backward',
    'grad_check',
    'Conv2d',
    'Linear',
    'Activation',
    'count_parameters',
    'named_parameters',
    'seeded',
    'zero_grad',
]
