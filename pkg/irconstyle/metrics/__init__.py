"""
Image quality metrics
"""

from .quality import gaussian_window, psnr, ssim
from .report import MetricReport

__all__ = [
    'MetricReport',
    'gaussian_window',
    'psnr',
    'ssim',
]
