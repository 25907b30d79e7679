"""
Seeded paired-patch sampling with crop and flip augmentation
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
import torch

from irconstyle.degradations.base import apply
from irconstyle.degradations.image_io import PathLike, read_png
from irconstyle.errors import DataError

logger = logging.getLogger(__name__)

Pair = Tuple[torch.Tensor, torch.Tensor]


class PatchSampler:
    """
    Emits (clean, degraded) patch pairs as a pure function of (seed, index)

    The stream position only decides which index comes next, so a resumed run
    reproduces the uninterrupted stream by restoring `position`.
    """

    def __init__(self, sources: Sequence[PathLike], patch: int = 128, augment: bool = True,
                 seed: int = 0, threads: int = 1):
        if not sources:
            raise DataError("patch sampler needs at least one source image")
        self.sources = [Path(p) for p in sources]
        self.patch = patch
        self.augment = augment
        self.seed = seed
        self.threads = max(1, threads)
        self.position = 0
        self._cache: Dict[int, torch.Tensor] = {}

    def _image(self, index: int) -> torch.Tensor:
        if index not in self._cache:
            image = read_png(self.sources[index])
            if image.shape[1] < self.patch or image.shape[2] < self.patch:
                raise DataError(
                    f"{self.sources[index]} is {image.shape[2]}x{image.shape[1]}, "
                    f"smaller than the {self.patch}px patch",
                    path=str(self.sources[index]),
                )
            self._cache[index] = image
        return self._cache[index]

    def pair_at(self, index: int, spec: Any) -> Pair:
        """
        The index-th pair of the stream

        Args:
            index: Position in the stream
            spec: Degradation spec applied after cropping

        Returns:
            (clean, degraded), each (3, patch, patch) in [0, 1]
        """
        rng = np.random.default_rng([self.seed, index])
        source = int(rng.integers(len(self.sources)))
        image = self._image(source)
        _, height, width = image.shape
        if self.augment:
            top = int(rng.integers(height - self.patch + 1))
            left = int(rng.integers(width - self.patch + 1))
            flip_h, flip_v = bool(rng.integers(2)), bool(rng.integers(2))
        else:
            top, left, flip_h, flip_v = 0, 0, False, False
        clean = image[:, top:top + self.patch, left:left + self.patch]
        if flip_h:
            clean = torch.flip(clean, dims=(2,))
        if flip_v:
            clean = torch.flip(clean, dims=(1,))
        clean = clean.contiguous()
        degradation_seed = int(rng.integers(2 ** 62))
        degraded = apply(spec, clean[None], degradation_seed)[0]
        return clean, degraded

    def sample_pair(self, spec: Any) -> Pair:
        """Next pair of the stream"""
        pair = self.pair_at(self.position, spec)
        self.position += 1
        return pair

    def batch(self, size: int, spec: Any) -> Pair:
        """Next `size` pairs stacked into (size, 3, patch, patch) tensors, in stream order"""
        indices = list(range(self.position, self.position + size))
        self.position += size
        # Warm the cache on this thread so workers only read it
        for index in indices:
            self._image(int(np.random.default_rng([self.seed, index]).integers(len(self.sources))))
        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                pairs: List[Pair] = list(pool.map(lambda i: self.pair_at(i, spec), indices))
        else:
            pairs = [self.pair_at(i, spec) for i in indices]
        clean = torch.stack([p[0] for p in pairs])
        degraded = torch.stack([p[1] for p in pairs])
        return clean, degraded
