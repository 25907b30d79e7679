"""
8-bit RGB PNG input/output and corpus manifests
"""

import logging
from pathlib import Path
from typing import List, Union

import numpy as np
import torch
from PIL import Image, UnidentifiedImageError

from irconstyle.errors import DataError, ImageFormatError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_png(path: PathLike) -> torch.Tensor:
    """
    Load an RGB PNG as a float32 (3, H, W) tensor in [0, 1]

    Args:
        path: PNG file

    Returns:
        Image tensor
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"image not found: {path}", path=str(path))
    try:
        with Image.open(path) as img:
            if img.format != "PNG":
                raise ImageFormatError(f"{path} is {img.format}, expected PNG")
            if img.mode != "RGB":
                raise ImageFormatError(f"{path} has mode {img.mode}, expected RGB")
            pixels = np.asarray(img, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise ImageFormatError(f"{path} is not a readable image") from exc
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}", path=str(path)) from exc
    return torch.from_numpy(pixels.astype(np.float32) / 255.0).permute(2, 0, 1).contiguous()


def write_png(path: PathLike, image: torch.Tensor) -> None:
    """Quantise a (3, H, W) tensor in [0, 1] to 8 bits and save it as PNG"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pixels = image.detach().clamp(0.0, 1.0).mul(255.0).round().to(torch.uint8)
    Image.fromarray(pixels.permute(1, 2, 0).cpu().numpy()).save(path, format="PNG")


def read_manifest(manifest: PathLike) -> List[Path]:
    """
    Resolve a manifest of image paths (one per line, relative to the manifest)

    Blank lines and lines starting with '#' are skipped.
    """
    manifest = Path(manifest)
    try:
        lines = manifest.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read manifest {manifest}: {exc}", path=str(manifest)) from exc
    entries = [line.strip() for line in lines]
    paths = [manifest.parent / entry for entry in entries if entry and not entry.startswith("#")]
    logger.debug("manifest %s lists %d images", manifest, len(paths))
    return paths


def write_manifest(manifest: PathLike, paths: List[PathLike]) -> None:
    manifest = Path(manifest)
    manifest.parent.mkdir(parents=True, exist_ok=True)
    root = manifest.parent.resolve()
    rel = [Path(p).resolve().relative_to(root).as_posix() for p in paths]
    manifest.write_text("\n".join(rel) + "\n", encoding="utf-8")
