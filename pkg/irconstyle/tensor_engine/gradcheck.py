"""
Central finite-difference gradient checking
"""

import logging
from typing import Callable, Optional, Sequence

import torch

from irconstyle.errors import ContractError

logger = logging.getLogger(__name__)

# Below this magnitude gradients are compared absolutely rather than relatively
REL_FLOOR = 1e-3


def grad_check(f: Callable[..., torch.Tensor], inputs: Sequence[torch.Tensor],
               eps: float = 1e-6, max_elements: Optional[int] = None,
               seed: int = 0) -> float:
    """
    Compare autograd gradients of a scalar function against central differences

    Args:
        f: Function of `inputs` returning a scalar tensor
        inputs: 64-bit tensors; each is checked element by element
        eps: Perturbation in (0, 1e-2]
        max_elements: Check at most this many elements per input (sampled
            deterministically from `seed`); all elements when None
        seed: Seed for the element sample

    Returns:
        Maximum relative error |analytic - numeric| / max(|analytic|, |numeric|, REL_FLOOR)
    """
    if not 0.0 < eps <= 1e-2:
        raise ContractError(f"grad_check: eps must be in (0, 1e-2], got {eps}")
    leaves = []
    for x in inputs:
        if x.dtype != torch.float64:
            raise ContractError(f"grad_check needs float64 inputs, got {x.dtype}")
        leaves.append(x.detach().clone().requires_grad_(True))

    out = f(*leaves)
    if out.numel() != 1:
        raise ContractError(f"grad_check: f must return a scalar, got shape {tuple(out.shape)}")
    analytic = torch.autograd.grad(out, leaves, allow_unused=True)

    generator = torch.Generator().manual_seed(seed)
    worst = 0.0
    with torch.no_grad():
        probes = [x.detach().clone() for x in leaves]
        for index, x in enumerate(probes):
            grad = analytic[index]
            grad = torch.zeros_like(x) if grad is None else grad
            flat = x.view(-1)
            positions = torch.arange(flat.numel())
            if max_elements is not None and flat.numel() > max_elements:
                positions = torch.randperm(flat.numel(), generator=generator)[:max_elements]
            for pos in positions.tolist():
                original = float(flat[pos])
                flat[pos] = original + eps
                plus = float(f(*probes))
                flat[pos] = original - eps
                minus = float(f(*probes))
                flat[pos] = original
                numeric = (plus - minus) / (2.0 * eps)
                exact = float(grad.reshape(-1)[pos])
                denom = max(abs(exact), abs(numeric), REL_FLOOR)
                worst = max(worst, abs(exact - numeric) / denom)
    logger.debug("grad_check max relative error %.3e", worst)
    return worst
