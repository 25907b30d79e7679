"""
AdamW with per-iteration learning rate and named gradient checks
"""

from typing import Dict, Optional

import torch
from torch.optim import AdamW

from irconstyle.errors import ModelError, TrainingError


def build_optimizer(params: Dict[str, torch.nn.Parameter], cfg) -> AdamW:
    """
    AdamW over the trainable parameters, in a fixed name order

    Args:
        params: Name -> parameter map (encoder, restoration net, injectors)
        cfg: TrainConfig (lr_init, betas, weight_decay)

    Returns:
        Optimizer whose state is aligned with `params` by position
    """
    return AdamW(
        list(params.values()),
        lr=cfg.lr_init,
        betas=tuple(cfg.betas),
        weight_decay=cfg.weight_decay,
        eps=1e-8,
        foreach=False,
    )


def clip_gradients(params: Dict[str, torch.nn.Parameter], max_norm: Optional[float]) -> Optional[float]:
    """Global-norm clip; returns the pre-clip norm, or None when clipping is off"""
    if max_norm is None:
        return None
    grads = [p for p in params.values() if p.grad is not None]
    return float(torch.nn.utils.clip_grad_norm_(grads, max_norm))


def adamw_step(params: Dict[str, torch.nn.Parameter], optimizer: AdamW, lr: float) -> None:
    """
    One decoupled-weight-decay update with bias correction

    Args:
        params: Name -> parameter map the optimizer was built over
        optimizer: AdamW holding the first/second moment state
        lr: Learning rate for this step

    Returns:
        None; parameters are updated in place
    """
    group_params = optimizer.param_groups[0]["params"]
    if len(group_params) != len(params):
        raise ModelError(f"optimizer tracks {len(group_params)} parameters, got {len(params)}")
    for name, p in params.items():
        if p.grad is not None and not bool(torch.isfinite(p.grad).all()):
            raise TrainingError(f"non-finite gradient for parameter {name}", parameter=name)
    for group in optimizer.param_groups:
        group["lr"] = lr
    optimizer.step()


def moments(params: Dict[str, torch.nn.Parameter], optimizer: AdamW) -> Dict[str, torch.Tensor]:
    """Optimizer state flattened to named tensors for checkpointing"""
    out: Dict[str, torch.Tensor] = {}
    for name, p in params.items():
        state = optimizer.state.get(p)
        if not state:
            continue
        out[f"optimizer.{name}.exp_avg"] = state["exp_avg"]
        out[f"optimizer.{name}.exp_avg_sq"] = state["exp_avg_sq"]
        out[f"optimizer.{name}.step"] = torch.as_tensor(state["step"], dtype=torch.float32).reshape(1)
    return out


def restore_moments(params: Dict[str, torch.nn.Parameter], optimizer: AdamW,
                    tensors: Dict[str, torch.Tensor]) -> None:
    """Inverse of `moments`; parameters without saved state start fresh"""
    for name, p in params.items():
        key = f"optimizer.{name}"
        if f"{key}.exp_avg" not in tensors:
            continue
        optimizer.state[p] = {
            "step": tensors[f"{key}.step"].reshape(()).clone().to(torch.float32),
            "exp_avg": tensors[f"{key}.exp_avg"].clone().to(p.dtype),
            "exp_avg_sq": tensors[f"{key}.exp_avg_sq"].clone().to(p.dtype),
        }
