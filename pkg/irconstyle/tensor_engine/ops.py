"""
Differentiable operators over torch tensors with explicit shape contracts

Every operator validates its operands up front (no broadcasting is ever
relied upon), delegates the arithmetic and its derivative to torch autograd,
and rejects non-finite results.
"""

import math
from typing import List, Optional, Sequence

import torch
import torch.nn.functional as F

from irconstyle.errors import ContractError, DimensionError, DomainError, NonFiniteError

Tensor = torch.Tensor


def _shape(x: Tensor) -> tuple:
    return tuple(x.shape)


def _finite(out: Tensor, op: str) -> Tensor:
    """Surface NaN/Inf to the caller instead of letting it propagate"""
    if not bool(torch.isfinite(out).all()):
        raise NonFiniteError(f"{op} produced non-finite values (shape {_shape(out)})")
    return out


def _same_shape(a: Tensor, b: Tensor, op: str) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"{op}: shape {_shape(a)} does not match {_shape(b)}")


def _rank(x: Tensor, rank: int, op: str, name: str = "input") -> None:
    if x.dim() != rank:
        raise DimensionError(f"{op}: {name} must be rank {rank}, got shape {_shape(x)}")


# ---------------------------------------------------------------------------
# Convolution and sub-pixel rearrangement
# ---------------------------------------------------------------------------

def conv2d(input: Tensor, weight: Tensor, bias: Optional[Tensor] = None,
           stride: int = 1, padding: int = 0) -> Tensor:
    """
    2-D cross-correlation over NCHW input

    Args:
        input: Tensor (N, C, H, W)
        weight: Tensor (O, C, kH, kW)
        bias: Optional tensor (O,)
        stride: Step between windows, >= 1
        padding: Zero padding on each spatial side, >= 0

    Returns:
        Tensor (N, O, floor((H + 2p - kH)/s) + 1, floor((W + 2p - kW)/s) + 1)
    """
    _rank(input, 4, "conv2d")
    _rank(weight, 4, "conv2d", "weight")
    if stride < 1 or padding < 0:
        raise ContractError(f"conv2d: stride must be >= 1 and padding >= 0, got {stride}, {padding}")
    if input.shape[1] != weight.shape[1]:
        raise DimensionError(
            f"conv2d: input {_shape(input)} has {input.shape[1]} channels "
            f"but weight {_shape(weight)} expects {weight.shape[1]}"
        )
    kh, kw = weight.shape[2], weight.shape[3]
    if input.shape[2] + 2 * padding < kh or input.shape[3] + 2 * padding < kw:
        raise DimensionError(f"conv2d: kernel {_shape(weight)} larger than padded input {_shape(input)}")
    if bias is not None and _shape(bias) != (weight.shape[0],):
        raise DimensionError(f"conv2d: bias {_shape(bias)} does not match weight {_shape(weight)}")
    return _finite(F.conv2d(input, weight, bias, stride=stride, padding=padding), "conv2d")


def pixel_shuffle(x: Tensor, r: int) -> Tensor:
    """
    Rearrange (N, C*r*r, H, W) into (N, C, H*r, W*r)

    Channel c*r*r + i*r + j of the input lands at spatial offset (i, j) of
    output channel c.
    """
    _rank(x, 4, "pixel_shuffle")
    if r < 1 or x.shape[1] % (r * r) != 0:
        raise DimensionError(f"pixel_shuffle: channels of {_shape(x)} not divisible by r^2 = {r * r}")
    if r == 1:
        return x
    return F.pixel_shuffle(x, r)


def pixel_unshuffle(x: Tensor, r: int) -> Tensor:
    """Inverse of pixel_shuffle: (N, C, H*r, W*r) -> (N, C*r*r, H, W)"""
    _rank(x, 4, "pixel_unshuffle")
    if r < 1 or x.shape[2] % r != 0 or x.shape[3] % r != 0:
        raise DimensionError(f"pixel_unshuffle: spatial dims of {_shape(x)} not divisible by {r}")
    if r == 1:
        return x
    return F.pixel_unshuffle(x, r)


def reflect_pad(x: Tensor, pad: int) -> Tensor:
    """Reflect-pad both spatial axes of an NCHW tensor by `pad`"""
    _rank(x, 4, "reflect_pad")
    if pad < 0 or pad >= min(x.shape[2], x.shape[3]):
        raise DimensionError(f"reflect_pad: pad {pad} invalid for {_shape(x)}")
    if pad == 0:
        return x
    return F.pad(x, (pad, pad, pad, pad), mode="reflect")


# ---------------------------------------------------------------------------
# Dense layers
# ---------------------------------------------------------------------------

def linear(x: Tensor, weight: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """
    Affine map x @ W^T + b

    Args:
        x: Tensor (B, in)
        weight: Tensor (out, in)
        bias: Optional tensor (out,)

    Returns:
        Tensor (B, out)
    """
    _rank(x, 2, "linear")
    _rank(weight, 2, "linear", "weight")
    if x.shape[1] != weight.shape[1]:
        raise DimensionError(f"linear: input {_shape(x)} incompatible with weight {_shape(weight)}")
    if bias is not None and _shape(bias) != (weight.shape[0],):
        raise DimensionError(f"linear: bias {_shape(bias)} does not match weight {_shape(weight)}")
    return _finite(F.linear(x, weight, bias), "linear")


# ---------------------------------------------------------------------------
# Elementwise
# ---------------------------------------------------------------------------

def add(a: Tensor, b: Tensor) -> Tensor:
    _same_shape(a, b, "add")
    return _finite(a + b, "add")


def mul(a: Tensor, b: Tensor) -> Tensor:
    _same_shape(a, b, "mul")
    return _finite(a * b, "mul")


def scale(x: Tensor, factor: float) -> Tensor:
    return _finite(x * factor, "scale")


def leaky_relu(x: Tensor, negative_slope: float = 0.2) -> Tensor:
    return F.leaky_relu(x, negative_slope)


def gelu(x: Tensor) -> Tensor:
    return F.gelu(x)


def sigmoid(x: Tensor) -> Tensor:
    return torch.sigmoid(x)


def exp(x: Tensor) -> Tensor:
    return _finite(torch.exp(x), "exp")


def log(x: Tensor) -> Tensor:
    if bool((x <= 0).any()):
        raise DomainError(f"log of non-positive value (min {float(x.min()):.6g})")
    return torch.log(x)


def clamp(x: Tensor, low: float, high: float) -> Tensor:
    return torch.clamp(x, low, high)


# ---------------------------------------------------------------------------
# Shape manipulation and reductions
# ---------------------------------------------------------------------------

def concat(tensors: Sequence[Tensor], axis: int) -> Tensor:
    """Concatenate along `axis`; every other dimension must agree exactly"""
    if not tensors:
        raise DimensionError("concat: no tensors given")
    first = tensors[0]
    for other in tensors[1:]:
        if other.dim() != first.dim():
            raise DimensionError(f"concat: ranks differ, {_shape(first)} vs {_shape(other)}")
        for dim in range(first.dim()):
            if dim != axis % first.dim() and other.shape[dim] != first.shape[dim]:
                raise DimensionError(f"concat along {axis}: {_shape(first)} vs {_shape(other)}")
    return torch.cat(list(tensors), dim=axis)


def broadcast_spatial(code: Tensor, height: int, width: int) -> Tensor:
    """Tile a (B, d) code over an explicit (H, W) grid -> (B, d, H, W)"""
    _rank(code, 2, "broadcast_spatial")
    return code[:, :, None, None].expand(code.shape[0], code.shape[1], height, width)


def global_avg_pool(x: Tensor) -> Tensor:
    """(N, C, H, W) -> (N, C)"""
    _rank(x, 4, "global_avg_pool")
    return x.mean(dim=(2, 3))


def mean(x: Tensor) -> Tensor:
    return x.mean()


def sum(x: Tensor) -> Tensor:  # noqa: A001 - mirrors the operator name
    return x.sum()


def dot(q: Tensor, k: Tensor) -> Tensor:
    """Inner product of two vectors of equal length"""
    _rank(q, 1, "dot", "q")
    _same_shape(q, k, "dot")
    return torch.dot(q, k)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    _rank(a, 2, "matmul", "a")
    _rank(b, 2, "matmul", "b")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul: {_shape(a)} @ {_shape(b)} inner dims differ")
    return _finite(a @ b, "matmul")


def l2_normalize(x: Tensor, eps: float = 1e-12) -> Tensor:
    """Row-wise L2 normalisation of a (B, d) tensor"""
    _rank(x, 2, "l2_normalize")
    return F.normalize(x, dim=1, eps=eps)


def gram(x: Tensor) -> Tensor:
    """Batch-averaged gram matrix x^T x / B of a (B, d) tensor -> (d, d)"""
    _rank(x, 2, "gram")
    return matmul(x.t(), x) / x.shape[0]


# ---------------------------------------------------------------------------
# Losses
# ---------------------------------------------------------------------------

def l1_loss(a: Tensor, b: Tensor) -> Tensor:
    _same_shape(a, b, "l1_loss")
    return _finite(F.l1_loss(a, b, reduction="mean"), "l1_loss")


def mse_loss(a: Tensor, b: Tensor) -> Tensor:
    _same_shape(a, b, "mse_loss")
    return _finite(F.mse_loss(a, b, reduction="mean"), "mse_loss")


def frobenius_norm(x: Tensor) -> Tensor:
    # sqrt has an undefined derivative at 0; route through a safe form
    squared = (x * x).sum()
    if squared.detach().item() == 0.0:
        return squared
    return torch.sqrt(squared)


def log_softmax_nll(logits: Tensor, positive_column: int = 0) -> Tensor:
    """Mean over rows of -log softmax(logits)[row, positive_column]"""
    _rank(logits, 2, "log_softmax_nll")
    return _finite(-F.log_softmax(logits, dim=1)[:, positive_column].mean(), "log_softmax_nll")


def logsumexp(x: Tensor, axis: int) -> Tensor:
    return _finite(torch.logsumexp(x, dim=axis), "logsumexp")


# ---------------------------------------------------------------------------
# Backward
# ---------------------------------------------------------------------------

def backward(loss: Tensor) -> None:
    """
    Populate .grad on every reachable leaf that requires grad

    Gradients accumulate across calls until cleared.
    """
    if loss.numel() != 1 or loss.dim() > 1:
        raise ContractError(f"backward needs a scalar loss, got shape {_shape(loss)}")
    if not loss.requires_grad:
        raise ContractError("backward: loss does not depend on any parameter")
    loss.backward()


def pad_to_multiple(x: Tensor, multiple: int) -> Tensor:
    """Replicate-pad the bottom and right of an NCHW tensor up to a multiple of `multiple`"""
    _rank(x, 4, "pad_to_multiple")
    pad_h = (-x.shape[2]) % multiple
    pad_w = (-x.shape[3]) % multiple
    if pad_h == 0 and pad_w == 0:
        return x
    return F.pad(x, (0, pad_w, 0, pad_h), mode="replicate")


def require_divisible(x: Tensor, factor: int, op: str) -> None:
    """Spatial dims of an NCHW tensor must be multiples of `factor`"""
    _rank(x, 4, op)
    if x.shape[2] % factor or x.shape[3] % factor:
        raise DimensionError(f"{op}: spatial dims of {_shape(x)} must be divisible by {factor}")


def check_unit_norm(codes: Tensor, tol: float = 1e-6, op: str = "codes") -> None:
    norms = codes.detach().double().norm(dim=1)
    worst = float((norms - 1.0).abs().max()) if norms.numel() else 0.0
    if not math.isfinite(worst) or worst > tol:
        raise DomainError(f"{op}: rows must be unit norm (max deviation {worst:.3g})")


__all__: List[str] = [
    "Tensor", "conv2d", "pixel_shuffle", "pixel_unshuffle", "reflect_pad", "linear",
    "add", "mul", "scale", "leaky_relu", "gelu", "sigmoid", "exp", "log", "clamp",
    "concat", "broadcast_spatial", "global_avg_pool", "mean", "sum", "dot", "matmul",
    "l2_normalize", "gram", "l1_loss", "mse_loss", "frobenius_norm", "log_softmax_nll",
    "logsumexp", "backward", "pad_to_multiple", "require_divisible", "check_unit_norm",
]
