"""
Gradient-check suite and parameter accounting used by the CLI
"""

import logging
from typing import Callable, Dict, List, Optional

import torch

from irconstyle.constyle import ConStyleConfig, NegativeQueue, content_loss, info_nce, style_loss
from irconstyle.constyle.encoder import LatentBundle
from irconstyle.restoration import AffineInjector, Downsample, NetConfig, Upsample, affine_inject, build
from irconstyle.tensor_engine import grad_check, ops, seeded
from irconstyle.trainer.config import TrainConfig
from irconstyle.trainer.engine import build_model

logger = logging.getLogger(__name__)

TOLERANCE = 1e-4
END_TO_END_TOLERANCE = 1e-3


def _rand(*shape: int, generator: torch.Generator) -> torch.Tensor:
    return torch.randn(*shape, generator=generator, dtype=torch.float64)


def _unit(rows: int, dim: int, generator: torch.Generator) -> torch.Tensor:
    return torch.nn.functional.normalize(_rand(rows, dim, generator=generator), dim=1)


def check_conv2d(g: torch.Generator) -> float:
    x, w, b = _rand(1, 2, 5, 5, generator=g), _rand(3, 2, 3, 3, generator=g), _rand(3, generator=g)
    return grad_check(lambda x, w, b: ops.sum(ops.conv2d(x, w, b, stride=1, padding=1)), [x, w, b])


def check_linear(g: torch.Generator) -> float:
    x, w, b = _rand(3, 4, generator=g), _rand(2, 4, generator=g), _rand(2, generator=g)
    return grad_check(lambda x, w, b: ops.sum(ops.exp(ops.scale(ops.linear(x, w, b), 0.1))), [x, w, b])


def check_pixel_shuffle(g: torch.Generator) -> float:
    x, weight = _rand(1, 8, 2, 2, generator=g), _rand(1, 2, 4, 4, generator=g)

    def f(x):
        shuffled = ops.pixel_shuffle(x, 2)
        return ops.sum(ops.mul(shuffled, weight)) + ops.sum(ops.mul(ops.pixel_unshuffle(shuffled, 2), x))

    return grad_check(f, [x])


def check_losses(g: torch.Generator) -> float:
    a, b = _rand(2, 3, 4, 4, generator=g), _rand(2, 3, 4, 4, generator=g)
    l1 = grad_check(lambda a: ops.l1_loss(a, b), [a])
    mse = grad_check(lambda a: ops.mse_loss(a, b), [a])
    frob = grad_check(lambda a: ops.frobenius_norm(a), [a])
    return max(l1, mse, frob)


def check_gram_losses(g: torch.Generator) -> float:
    q, k, q1, q2 = (_rand(4, 6, generator=g) for _ in range(4))
    content = grad_check(lambda q: content_loss(q, k), [q])
    style = grad_check(lambda q: style_loss(q, q1, q2).value, [q])
    return max(content, style)


def check_info_nce(g: torch.Generator) -> float:
    queue = NegativeQueue(8, 6, dtype=torch.float64)
    queue.push(_unit(8, 6, g))
    q, k = _rand(3, 6, generator=g), _unit(3, 6, g)
    moco = grad_check(lambda q, k: info_nce(ops.l2_normalize(q), k, queue, 0.5, "moco"), [q, k])
    literal = grad_check(lambda q: info_nce(ops.l2_normalize(q), k, queue, 0.5, "literal"), [q])
    return max(moco, literal)


def check_affine_inject(g: torch.Generator) -> float:
    with seeded(1):
        injector = AffineInjector(3, 4).double()
    with torch.no_grad():
        for p in injector.parameters():
            p.copy_(_rand(*p.shape, generator=g) * 0.5)
    features, latent = _rand(2, 4, 3, 3, generator=g), _rand(2, 3, 3, 3, generator=g)
    return grad_check(lambda f, m: ops.sum(affine_inject(injector, f, m)), [features, latent])


def check_sampling(g: torch.Generator) -> float:
    with seeded(2):
        down, up = Downsample(4, 8).double(), Upsample(8, 4).double()
    x = _rand(1, 4, 4, 4, generator=g)
    weight = _rand(1, 4, 4, 4, generator=g)
    return grad_check(lambda x: ops.sum(ops.mul(up(down(x)), weight)), [x])


def check_end_to_end(g: torch.Generator) -> float:
    """Tiny net (width 4, one block per level) with a smooth activation"""
    net_cfg = NetConfig(width=4, levels=3, blocks_left=[1, 1, 1], blocks_bottom=1,
                        blocks_right=[1, 1, 1], activation="gelu")
    constyle_cfg = ConStyleConfig(width=4, latent_dim=8, head_width=8, mlp_hidden=8, activation="gelu")
    net = build(net_cfg, constyle_cfg, seed=3).double()
    with torch.no_grad():
        for module in list(net.injectors) + [net.code_fusion]:
            for p in module.parameters():
                p.copy_(_rand(*p.shape, generator=g) * 0.1)
    bundle = LatentBundle(
        code=_unit(1, 8, g),
        feature_maps=[_rand(1, 4 * 2 ** i, 4 // 2 ** i, 4 // 2 ** i, generator=g) for i in range(3)],
    )
    x = _rand(1, 3, 8, 8, generator=g)
    weight = _rand(1, 3, 8, 8, generator=g)
    return grad_check(lambda x: ops.sum(ops.mul(net(x, bundle, inject=True), weight)), [x])


GRADIENT_SUITE: Dict[str, Callable[[torch.Generator], float]] = {
    "conv2d": check_conv2d,
    "linear": check_linear,
    "pixel_shuffle": check_pixel_shuffle,
    "losses": check_losses,
    "gram_losses": check_gram_losses,
    "info_nce": check_info_nce,
    "affine_inject": check_affine_inject,
    "sampling": check_sampling,
    "end_to_end": check_end_to_end,
}


def run_gradient_suite(only: Optional[List[str]] = None, seed: int = 0) -> Dict[str, Dict[str, float]]:
    """
    Run the named checks (all by default)

    Returns:
        name -> {"max_rel_err", "tolerance", "passed"}
    """
    names = only or list(GRADIENT_SUITE)
    unknown = [n for n in names if n not in GRADIENT_SUITE]
    if unknown:
        raise KeyError(f"unknown gradient checks {unknown}; known: {sorted(GRADIENT_SUITE)}")
    results = {}
    for name in names:
        generator = torch.Generator().manual_seed(seed)
        error = GRADIENT_SUITE[name](generator)
        tolerance = END_TO_END_TOLERANCE if name == "end_to_end" else TOLERANCE
        results[name] = {"max_rel_err": error, "tolerance": tolerance, "passed": error < tolerance}
        logger.info("gradcheck %-14s %.3e (%s)", name, error, "ok" if error < tolerance else "FAIL")
    return results


def parameter_report(cfg: TrainConfig) -> Dict[str, object]:
    """Per-sub-module parameter totals for `cfg` and for the full-size reference net"""
    report: Dict[str, object] = dict(build_model(cfg).parameter_report())
    reference = build(NetConfig.reference(), cfg.effective_constyle(), seed=cfg.seed)
    report["reference_net"] = reference.parameter_report()
    return report
