"""
PSNR and SSIM for images in [0, 1]
"""

import math

import torch

from irconstyle.errors import DimensionError
from irconstyle.tensor_engine import ops

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
K1, K2 = 0.01, 0.03


def _as_chw(image: torch.Tensor, op: str) -> torch.Tensor:
    if image.dim() == 4 and image.shape[0] == 1:
        image = image[0]
    if image.dim() != 3:
        raise DimensionError(f"{op}: expected (C, H, W) image, got shape {tuple(image.shape)}")
    return image.detach().to(torch.float64)


def _pair(a: torch.Tensor, b: torch.Tensor, op: str):
    a, b = _as_chw(a, op), _as_chw(b, op)
    if a.shape != b.shape:
        raise DimensionError(f"{op}: shape {tuple(a.shape)} does not match {tuple(b.shape)}")
    return a, b


def psnr(a: torch.Tensor, b: torch.Tensor) -> float:
    """
    Peak signal-to-noise ratio in dB with peak 1

    Args:
        a: Image (C, H, W) in [0, 1]
        b: Image of the same shape

    Returns:
        10 * log10(1 / MSE); +inf for identical images
    """
    a, b = _pair(a, b, "psnr")
    mse = float(((a - b) ** 2).mean())
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> torch.Tensor:
    radius = size // 2
    axis = torch.arange(-radius, radius + 1, dtype=torch.float64)
    profile = torch.exp(-(axis ** 2) / (2.0 * sigma ** 2))
    profile = profile / profile.sum()
    return torch.outer(profile, profile)


def ssim(a: torch.Tensor, b: torch.Tensor) -> float:
    """
    Mean local SSIM on luma (channel mean) with an 11x11 Gaussian window

    Statistics are taken over valid window positions only, with
    K1 = 0.01, K2 = 0.03 and dynamic range 1.

    Args:
        a: Image (C, H, W) in [0, 1]
        b: Image of the same shape

    Returns:
        SSIM in [-1, 1]
    """
    a, b = _pair(a, b, "ssim")
    if a.shape[1] < SSIM_WINDOW or a.shape[2] < SSIM_WINDOW:
        raise DimensionError(f"ssim: image {tuple(a.shape)} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")
    x = a.mean(dim=0)[None, None]
    y = b.mean(dim=0)[None, None]
    window = gaussian_window()[None, None]
    c1, c2 = K1 ** 2, K2 ** 2

    def local(t: torch.Tensor) -> torch.Tensor:
        return ops.conv2d(t, window, None, stride=1, padding=0)

    mu_x, mu_y = local(x), local(y)
    sigma_x = local(x * x) - mu_x * mu_x
    sigma_y = local(y * y) - mu_y * mu_y
    sigma_xy = local(x * y) - mu_x * mu_y

    numerator = (2 * mu_x * mu_y + c1) * (2 * sigma_xy + c2)
    denominator = (mu_x * mu_x + mu_y * mu_y + c1) * (sigma_x + sigma_y + c2)
    return min(1.0, max(-1.0, float((numerator / denominator).mean())))
