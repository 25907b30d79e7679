"""
Procedural RGB images for desk-scale corpora (no downloads)
"""

import logging
from pathlib import Path
from typing import List

import numpy as np
import torch

from irconstyle.degradations.image_io import PathLike, write_manifest, write_png

logger = logging.getLogger(__name__)


def synth_image(size: int, rng: np.random.Generator) -> np.ndarray:
    """
    One (3, size, size) float image in [0, 1]

    A colour gradient background with rectangles, discs and a stripe patch,
    giving both flat regions and edges for a denoiser to learn from. Values
    stay within [0.15, 0.85] so clamping after noise rarely bites.
    """
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64) / max(size - 1, 1)
    start, end = rng.uniform(0.15, 0.85, 3), rng.uniform(0.15, 0.85, 3)
    angle = rng.uniform(0, 2 * np.pi)
    ramp = np.cos(angle) * xx + np.sin(angle) * yy
    ramp = (ramp - ramp.min()) / max(ramp.max() - ramp.min(), 1e-9)
    image = start[:, None, None] + (end - start)[:, None, None] * ramp[None]

    for _ in range(int(rng.integers(2, 6))):
        colour = rng.uniform(0.15, 0.85, 3)[:, None, None]
        if rng.random() < 0.5:
            x0, y0 = rng.uniform(0, 0.8, 2)
            w, h = rng.uniform(0.1, 0.5, 2)
            mask = (xx >= x0) & (xx < x0 + w) & (yy >= y0) & (yy < y0 + h)
        else:
            cx, cy = rng.uniform(0.1, 0.9, 2)
            radius = rng.uniform(0.05, 0.3)
            mask = (xx - cx) ** 2 + (yy - cy) ** 2 < radius ** 2
        image = np.where(mask[None], colour, image)

    period = rng.uniform(0.03, 0.12)
    x0, y0 = rng.uniform(0, 0.6, 2)
    stripes = (np.sin(2 * np.pi * (xx + yy) / period) > 0) & (xx >= x0) & (xx < x0 + 0.35) & (yy >= y0) & (yy < y0 + 0.35)
    image = np.where(stripes[None], 1.0 - image, image)
    return np.clip(image, 0.0, 1.0)


def write_corpus(directory: PathLike, count: int = 12, size: int = 128, seed: int = 0) -> Path:
    """
    Write `count` synthetic PNGs plus a manifest.txt listing them

    Args:
        directory: Output directory (created if needed)
        count: Number of images
        size: Side length in pixels
        seed: Generation seed

    Returns:
        Path of the manifest
    """
    directory = Path(directory)
    rng = np.random.default_rng(seed)
    paths: List[Path] = []
    for index in range(count):
        path = directory / f"synth_{index:04d}.png"
        write_png(path, torch.from_numpy(synth_image(size, rng)).float())
        paths.append(path)
    manifest = directory / "manifest.txt"
    write_manifest(manifest, paths)
    logger.info("wrote %d synthetic images to %s", count, directory)
    return manifest
