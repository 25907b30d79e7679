"""
Cosine-annealed learning rate
"""

import math

from irconstyle.errors import ContractError


def cosine_lr(iteration: int, cfg) -> float:
    """
    lr_final + 0.5 * (lr_init - lr_final) * (1 + cos(pi * iteration / total_iters))

    Args:
        iteration: Current iteration in [0, total_iters]
        cfg: TrainConfig (lr_init, lr_final, total_iters)

    Returns:
        Learning rate for this iteration
    """
    if not 0 <= iteration <= cfg.total_iters:
        raise ContractError(f"iteration {iteration} outside [0, {cfg.total_iters}]")
    # Endpoints are returned exactly
    if iteration == 0:
        return cfg.lr_init
    if iteration == cfg.total_iters:
        return cfg.lr_final
    progress = iteration / cfg.total_iters
    return cfg.lr_final + 0.5 * (cfg.lr_init - cfg.lr_final) * (1.0 + math.cos(math.pi * progress))
