"""
Held-out evaluation: degrade, restore, score
"""

import logging
from pathlib import Path
from typing import Any, List, Optional, Tuple, Union

from irconstyle.degradations import apply, read_manifest, read_png
from irconstyle.errors import DataError, ImageFormatError
from irconstyle.metrics import MetricReport, psnr, ssim
from irconstyle.metrics.quality import SSIM_WINDOW
from irconstyle.trainer.engine import IRConStyleModel, infer

logger = logging.getLogger(__name__)


def evaluate(model: Optional[IRConStyleModel], manifest: Union[str, Path], spec: Any,
             seed: int = 0, name: str = "eval", multiple: Optional[int] = None) -> MetricReport:
    """
    Average PSNR/SSIM of restored vs clean over a manifest

    Args:
        model: Model to evaluate; None scores the degraded input itself
        manifest: Corpus manifest
        spec: Degradation spec; image j is degraded with seed + j
        seed: Base seed
        name: Report name
        multiple: Crop images top-left to a multiple of this (defaults to 2^levels)

    Returns:
        MetricReport over the images that could be read
    """
    if multiple is None:
        multiple = model.net.config.downscale if model is not None else 1
    scores: List[Tuple[float, float]] = []
    for index, path in enumerate(read_manifest(manifest)):
        try:
            image = read_png(path)
        except (DataError, ImageFormatError) as exc:
            logger.warning("skipping %s: %s", path, exc)
            continue
        height = image.shape[1] - image.shape[1] % multiple
        width = image.shape[2] - image.shape[2] % multiple
        if min(height, width) < SSIM_WINDOW:
            logger.warning("skipping %s: %dx%d image is smaller than the %dx%d SSIM window after cropping",
                           path, image.shape[1], image.shape[2], SSIM_WINDOW, SSIM_WINDOW)
            continue
        clean = image[:, :height, :width].contiguous()[None]
        degraded = apply(spec, clean, seed + index)
        restored = degraded if model is None else infer(model, degraded)
        scores.append((psnr(restored[0], clean[0]), ssim(restored[0], clean[0])))
    report = MetricReport.from_scores(name, scores)
    logger.info("%s: %.3f dB / %.4f over %d images", name, report.psnr_db, report.ssim, report.count)
    return report
