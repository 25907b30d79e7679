"""
IRConStyle model, training state and the single-iteration training step
"""

import json
import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, Optional

import torch
from torch import nn

from irconstyle.constyle import ConStyle, content_loss, info_nce, style_loss
from irconstyle.errors import ModelError, NonFiniteError, TrainingError
from irconstyle.restoration import RestorationNet
from irconstyle.tensor_engine import backward, count_parameters, ops, seeded, zero_grad
from irconstyle.trainer.checkpoint import Checkpoint
from irconstyle.trainer.config import TrainConfig, parse_config
from irconstyle.trainer.optimizer import (
    adamw_step,
    build_optimizer,
    clip_gradients,
    moments,
    restore_moments,
)
from irconstyle.trainer.schedule import cosine_lr

logger = logging.getLogger(__name__)


class IRConStyleModel(nn.Module):
    """ConStyle plus the restoration network it feeds"""

    def __init__(self, cfg: TrainConfig):
        super().__init__()
        constyle_cfg = cfg.effective_constyle()
        self.constyle = ConStyle(constyle_cfg)
        self.net = RestorationNet(cfg.net, constyle_cfg)
        self.inject = not cfg.ablation.g2_no_feature_maps

    def trainable(self) -> Dict[str, nn.Parameter]:
        """Encoder and restoration parameters; the momentum encoder is excluded"""
        return {name: p for name, p in self.named_parameters() if p.requires_grad}

    def parameter_report(self) -> Dict[str, int]:
        report = {
            "constyle": count_parameters(self.constyle.encoder),
            "momentum_encoder": count_parameters(self.constyle.momentum),
        }
        report.update(self.net.parameter_report())
        report["inference_total"] = report["constyle"] + report["restoration"] + report["injectors"]
        return report


def build_model(cfg: TrainConfig) -> IRConStyleModel:
    """Deterministically initialised model for `cfg.seed`"""
    with seeded(cfg.seed):
        return IRConStyleModel(cfg)


@torch.no_grad()
def infer(model: IRConStyleModel, degraded: torch.Tensor) -> torch.Tensor:
    """
    Restore degraded images with the encoder and restoration net only

    Args:
        model: Trained or freshly built model
        degraded: Images (N, 3, H, W), H and W divisible by 2^levels

    Returns:
        Restored images clamped to [0, 1]
    """
    bundle = model.constyle.query(degraded)
    restored = model.net(degraded, bundle, inject=model.inject)
    return ops.clamp(restored, 0.0, 1.0)


def infer_image(model: IRConStyleModel, image: torch.Tensor) -> torch.Tensor:
    """Restore one (3, H, W) image of any size; borders are replicate-padded and cropped back"""
    height, width = image.shape[-2:]
    padded = ops.pad_to_multiple(image[None], model.net.config.downscale)
    return infer(model, padded)[0, :, :height, :width]


@dataclass
class LossBreakdown:
    """Per-term losses of one iteration; total is their weighted sum"""

    l1: float
    infonce: float
    content: float
    style: float
    total: float
    infonce_active: bool = True
    style_active: bool = True

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


class TrainState:
    """Model, optimizer and iteration counter of a run"""

    def __init__(self, cfg: TrainConfig, model: Optional[IRConStyleModel] = None):
        self.cfg = cfg
        self.model = model if model is not None else build_model(cfg)
        self.params = self.model.trainable()
        self.optimizer = build_optimizer(self.params, cfg)
        self.iteration = 0

    @property
    def queue(self):
        return self.model.constyle.queue

    def to_checkpoint(self) -> Checkpoint:
        tensors = {name: p.detach().clone() for name, p in self.model.named_parameters()}
        tensors.update({k: v.detach().clone() for k, v in moments(self.params, self.optimizer).items()})
        return Checkpoint(
            tensors=tensors,
            queue_capacity=self.queue.capacity,
            queue_rows=self.queue.contents(),
            iteration=self.iteration,
            config_json=self.cfg.to_json(),
        )

    @classmethod
    def from_checkpoint(cls, ckpt: Checkpoint, cfg: Optional[TrainConfig] = None) -> "TrainState":
        """Rebuild a run from a checkpoint (config echo used when `cfg` is None)"""
        cfg = cfg or parse_config(json.loads(ckpt.config_json))
        state = cls(cfg)
        named = dict(state.model.named_parameters())
        missing = [name for name in named if name not in ckpt.tensors]
        if missing:
            raise ModelError(f"checkpoint lacks parameters {missing[:5]}")
        with torch.no_grad():
            for name, p in named.items():
                saved = ckpt.tensors[name]
                if saved.shape != p.shape:
                    raise ModelError(f"parameter {name}: checkpoint shape {tuple(saved.shape)} vs {tuple(p.shape)}")
                p.copy_(saved)
        restore_moments(state.params, state.optimizer, ckpt.tensors)
        if ckpt.queue_capacity != state.queue.capacity:
            raise ModelError(f"checkpoint queue capacity {ckpt.queue_capacity} vs config {state.queue.capacity}")
        if ckpt.queue_rows.numel():
            state.queue.load(ckpt.queue_rows)
        state.iteration = ckpt.iteration
        return state


def train_step(state: TrainState, clean: torch.Tensor, degraded: torch.Tensor) -> LossBreakdown:
    """
    One iteration of the total loss L_style + L_content + L_InfoNCE + L_1

    Order: encode degraded (q, maps) -> momentum-encode the positive ->
    restore -> weighted loss -> backward + AdamW -> EMA -> enqueue.

    Args:
        state: Training state, updated in place
        clean: Clean batch (B, 3, H, W)
        degraded: Degraded counterpart of `clean`

    Returns:
        LossBreakdown of this iteration
    """
    cfg, model = state.cfg, state.model
    constyle = model.constyle
    weights = cfg.loss_weights
    if clean.shape != degraded.shape:
        raise ModelError(f"clean batch {tuple(clean.shape)} and degraded batch {tuple(degraded.shape)} differ")

    model.train()
    parts: Dict[str, float] = {}
    try:
        bundle = constyle.query(degraded)
        q = bundle.code
        if cfg.ablation.g3_queue_behind_momentum:
            # Positives and negatives both come from the momentum encoder on degraded input
            k = constyle.key_for(degraded)
            convention = "dasr"
            enqueue = k
        else:
            k = constyle.key_for(clean)
            convention = cfg.infonce_convention
            enqueue = q.detach()

        restored = model.net(degraded, bundle, inject=model.inject)
        l1 = ops.l1_loss(restored, clean)
        parts["l1"] = l1.detach().item()

        infonce_active = len(constyle.queue) > 0
        if infonce_active:
            nce = info_nce(q, k, constyle.queue, constyle.config.temperature, convention)
        else:
            nce = q.new_zeros(())
        parts["infonce"] = nce.detach().item()
        content = content_loss(q, k, cfg.gram_distance)
        parts["content"] = content.detach().item()
        q1, q2 = constyle.queue.preview(enqueue)
        style = style_loss(q, q1, q2, cfg.gram_distance, clamp=cfg.style_clamp)
        parts["style"] = style.value.detach().item()
    except NonFiniteError as exc:
        raise TrainingError(f"non-finite value at iteration {state.iteration}: {exc}",
                            breakdown=dict(parts)) from exc

    total = (weights.style * style.value + weights.content * content
             + weights.infonce * nce + weights.l1 * l1)
    breakdown = LossBreakdown(
        total=(weights.style * parts["style"] + weights.content * parts["content"]
               + weights.infonce * parts["infonce"] + weights.l1 * parts["l1"]),
        infonce_active=infonce_active,
        style_active=style.active,
        **parts,
    )
    if not math.isfinite(total.detach().item()):
        raise TrainingError(f"non-finite loss at iteration {state.iteration}", breakdown=breakdown.to_dict())

    zero_grad(model)
    backward(total)
    clip_gradients(state.params, cfg.grad_clip)
    lr = cosine_lr(min(state.iteration, cfg.total_iters), cfg)
    adamw_step(state.params, state.optimizer, lr)

    constyle.momentum_step()
    constyle.queue.push(enqueue)
    state.iteration += 1
    return breakdown
