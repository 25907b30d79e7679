"""
Contrastive-side losses: InfoNCE against the queue, gram content and style losses
"""

from dataclasses import dataclass
from typing import Literal, Optional

import torch

from irconstyle.constyle.queue import NegativeQueue
from irconstyle.errors import DimensionError, StateError
from irconstyle.tensor_engine import ops

Convention = Literal["moco", "literal", "dasr"]
GramDistance = Literal["mse", "frobenius"]


def _aligned(a: torch.Tensor, b: torch.Tensor, op: str) -> None:
    if a.dim() != 2 or a.shape != b.shape:
        raise DimensionError(f"{op}: expected equal (B, d) shapes, got {tuple(a.shape)} and {tuple(b.shape)}")


def info_nce(q: torch.Tensor, k: torch.Tensor, queue: NegativeQueue, t: float,
             convention: Convention = "moco") -> torch.Tensor:
    """
    InfoNCE of queries against their positives and the queued negatives

    Args:
        q: Queries (B, d); row i's positive is k[i]
        k: Positives (B, d); for the dasr convention pass k' (momentum
            encoding of the degraded image)
        queue: Negative queue, must be non-empty
        t: Temperature, > 0
        convention: moco and dasr include the positive in the denominator;
            literal sums over the negatives only

    Returns:
        Mean loss over the batch
    """
    _aligned(q, k, "info_nce")
    if len(queue) == 0:
        raise StateError("info_nce needs a non-empty negative queue")
    negatives = queue.negatives().to(q.dtype)
    if negatives.shape[1] != q.shape[1]:
        raise DimensionError(f"info_nce: codes have dim {q.shape[1]}, queue holds dim {negatives.shape[1]}")

    positive = (q * k).sum(dim=1, keepdim=True) / t
    negative = ops.matmul(q, negatives.t()) / t
    if convention == "literal":
        return (ops.logsumexp(negative, axis=1) - positive[:, 0]).mean()
    logits = ops.concat([positive, negative], axis=1)
    return ops.log_softmax_nll(logits, positive_column=0)


def gram_distance(a: torch.Tensor, b: torch.Tensor, distance: GramDistance = "mse") -> torch.Tensor:
    """Distance between batch-averaged gram matrices of two (B, d) code sets"""
    diff_a, diff_b = ops.gram(a), ops.gram(b)
    if distance == "frobenius":
        return ops.frobenius_norm(diff_a - diff_b)
    return ops.mse_loss(diff_a, diff_b)


def content_loss(q: torch.Tensor, k: torch.Tensor, distance: GramDistance = "mse") -> torch.Tensor:
    """Pull the query gram toward the clean-image gram: MSE(G(k), G(q))"""
    _aligned(q, k, "content_loss")
    return gram_distance(k, q, distance)


@dataclass
class StyleLoss:
    """Style loss value and whether it was active this step"""

    value: torch.Tensor
    active: bool


def style_loss(q: torch.Tensor, q1: Optional[torch.Tensor], q2: Optional[torch.Tensor],
               distance: GramDistance = "mse", clamp: Optional[float] = None) -> StyleLoss:
    """
    Push the query gram away from the outgoing queue codes

    -(D(G(q1), G(q)) + D(G(q2), G(q))), never positive.

    Args:
        q: Queries (B, d)
        q1: Codes leaving the queue, None while the queue is underfull
        q2: Codes about to leave the queue, None while the queue is underfull
        distance: Gram distance (mse or frobenius)
        clamp: When set, the loss is clamped below at -clamp

    Returns:
        StyleLoss; inactive (value 0) when q1/q2 are absent
    """
    if q1 is None or q2 is None:
        return StyleLoss(value=q.new_zeros(()), active=False)
    _aligned(q, q1, "style_loss")
    _aligned(q, q2, "style_loss")
    q1, q2 = q1.to(q.dtype), q2.to(q.dtype)
    value = -(gram_distance(q1, q, distance) + gram_distance(q2, q, distance))
    if clamp is not None:
        value = torch.clamp(value, min=-abs(clamp))
    return StyleLoss(value=value, active=True)
