"""
Degradation specs and operators, PNG I/O and the paired patch sampler
"""

import math

import numpy as np
import pytest
import torch
from PIL import Image

from irconstyle.degradations import (
    GaussianBlurSpec,
    GaussianNoise,
    GaussianNoiseSpec,
    PatchSampler,
    apply,
    parse_degradation,
    read_manifest,
    read_png,
    synth_image,
    write_corpus,
    write_png,
)
from irconstyle.errors import ConfigError, DataError, DomainError, ImageFormatError


def clean_batch(size=64, seed=0):
    rng = np.random.default_rng(seed)
    return torch.from_numpy(synth_image(size, rng)).float()[None]


class TestSpecs:

    def test_sigma_shorthands(self):
        assert parse_degradation(25).sigma == 25.0
        assert parse_degradation("0:50").sigma == (0.0, 50.0)
        assert parse_degradation({"kind": "gaussian_blur", "kernel": 7, "sigma": 2.0}).kernel == 7

    def test_out_of_range_sigma_names_field(self):
        with pytest.raises(ConfigError) as info:
            parse_degradation({"kind": "gaussian_noise", "sigma": 80})
        assert info.value.field.startswith("degradation")

    def test_even_blur_kernel_rejected(self):
        with pytest.raises(ConfigError):
            parse_degradation({"kind": "gaussian_blur", "kernel": 4})

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigError):
            parse_degradation({"kind": "jpeg", "quality": 10})

    def test_compose(self):
        spec = parse_degradation({"kind": "compose", "steps": [
            {"kind": "gaussian_blur", "kernel": 3, "sigma": 1.0},
            {"kind": "gaussian_noise", "sigma": 10},
        ]})
        out = apply(spec, clean_batch(32), seed=3)
        assert out.shape == (1, 3, 32, 32)
        assert float(out.min()) >= 0.0 and float(out.max()) <= 1.0


class TestGaussianNoise:

    def test_zero_sigma_is_exact(self):
        clean = clean_batch()
        assert torch.equal(apply(GaussianNoiseSpec(sigma=0.0), clean, seed=1), clean)

    def test_seed_determines_output(self):
        clean = clean_batch()
        a = apply(GaussianNoiseSpec(sigma=25.0), clean, seed=9)
        assert torch.equal(a, apply(GaussianNoiseSpec(sigma=25.0), clean, seed=9))
        assert not torch.equal(a, apply(GaussianNoiseSpec(sigma=25.0), clean, seed=10))

    def test_noise_standard_deviation(self):
        noise = GaussianNoise(GaussianNoiseSpec(sigma=25.0)).noise(
            torch.Size((1, 3, 128, 128)), torch.Generator().manual_seed(0), torch.float64)
        expected = 25.0 / 255.0
        assert abs(float(noise.std()) - expected) / expected < 0.02
        bound = 3 * expected / math.sqrt(noise.numel())
        assert abs(float(noise.mean())) < bound

    def test_random_sigma_drawn_per_image(self):
        op = GaussianNoise(GaussianNoiseSpec(sigma=(0.0, 50.0)))
        sigmas = op.sigmas(200, torch.Generator().manual_seed(0), torch.float64)
        assert float(sigmas.min()) >= 0.0 and float(sigmas.max()) <= 50.0
        assert float(sigmas.std()) > 5.0

    def test_output_clamped(self):
        out = apply(GaussianNoiseSpec(sigma=50.0), torch.ones(1, 3, 16, 16), seed=0)
        assert float(out.max()) <= 1.0 and float(out.min()) >= 0.0

    def test_out_of_range_input_rejected(self):
        with pytest.raises(DomainError):
            apply(GaussianNoiseSpec(sigma=5.0), torch.full((1, 3, 8, 8), 1.5), seed=0)


class TestGaussianBlur:

    def test_mean_brightness_preserved(self):
        clean = clean_batch(128).double()
        blurred = apply(GaussianBlurSpec(kernel=5, sigma=1.0), clean, seed=0)
        assert abs(float(blurred.mean()) - float(clean.mean())) < 1e-3

    def test_constant_image_unchanged(self):
        clean = torch.full((1, 3, 16, 16), 0.25, dtype=torch.float64)
        blurred = apply(GaussianBlurSpec(kernel=7, sigma=2.0), clean, seed=0)
        assert torch.allclose(blurred, clean, atol=1e-12)


class TestImageIO:

    def test_png_round_trip_is_8bit(self, tmp_path):
        image = torch.rand(3, 5, 7)
        write_png(tmp_path / "a.png", image)
        loaded = read_png(tmp_path / "a.png")
        assert loaded.shape == (3, 5, 7)
        assert float((loaded - image).abs().max()) <= 0.5 / 255 + 1e-6

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            read_png(tmp_path / "missing.png")

    def test_non_png_rejected(self, tmp_path):
        Image.new("RGB", (8, 8)).save(tmp_path / "a.jpg", format="JPEG")
        with pytest.raises(ImageFormatError):
            read_png(tmp_path / "a.jpg")

    def test_grayscale_rejected(self, tmp_path):
        Image.new("L", (8, 8)).save(tmp_path / "gray.png", format="PNG")
        with pytest.raises(ImageFormatError):
            read_png(tmp_path / "gray.png")

    def test_manifest_relative_paths(self, tmp_path):
        manifest = write_corpus(tmp_path / "set", count=3, size=16, seed=0)
        manifest.write_text("# comment\n\n" + manifest.read_text(encoding="utf-8"), encoding="utf-8")
        paths = read_manifest(manifest)
        assert len(paths) == 3 and all(p.is_file() for p in paths)

    def test_corpus_is_deterministic(self, tmp_path):
        a = read_manifest(write_corpus(tmp_path / "a", count=2, size=16, seed=5))
        b = read_manifest(write_corpus(tmp_path / "b", count=2, size=16, seed=5))
        assert all(torch.equal(read_png(x), read_png(y)) for x, y in zip(a, b))


class TestPatchSampler:

    def test_pair_shapes_and_range(self, corpus):
        sampler = PatchSampler(read_manifest(corpus), patch=16, seed=0)
        clean, degraded = sampler.sample_pair(GaussianNoiseSpec(sigma=25.0))
        assert clean.shape == degraded.shape == (3, 16, 16)
        for t in (clean, degraded):
            assert float(t.min()) >= 0.0 and float(t.max()) <= 1.0

    def test_unaugmented_full_crop_is_source(self, tmp_path):
        write_png(tmp_path / "one.png", torch.rand(3, 32, 32))
        sampler = PatchSampler([tmp_path / "one.png"], patch=32, augment=False)
        clean, degraded = sampler.sample_pair(GaussianNoiseSpec(sigma=0.0))
        source = read_png(tmp_path / "one.png")
        assert torch.equal(clean, source) and torch.equal(degraded, source)

    def test_stream_reproducible(self, corpus):
        spec = GaussianNoiseSpec(sigma=(0.0, 50.0))
        a = PatchSampler(read_manifest(corpus), patch=16, seed=3)
        b = PatchSampler(read_manifest(corpus), patch=16, seed=3, threads=4)
        first = [a.sample_pair(spec) for _ in range(100)]
        clean, degraded = b.batch(100, spec)
        assert all(torch.equal(c, clean[i]) and torch.equal(d, degraded[i]) for i, (c, d) in enumerate(first))

    def test_position_resumes_stream(self, corpus):
        spec = GaussianNoiseSpec(sigma=25.0)
        a = PatchSampler(read_manifest(corpus), patch=16, seed=1)
        a.batch(6, spec)
        expected = a.batch(2, spec)
        b = PatchSampler(read_manifest(corpus), patch=16, seed=1)
        b.position = 6
        resumed = b.batch(2, spec)
        assert torch.equal(expected[0], resumed[0]) and torch.equal(expected[1], resumed[1])

    def test_undersized_image_names_file(self, corpus):
        sampler = PatchSampler(read_manifest(corpus), patch=64)
        with pytest.raises(DataError) as info:
            sampler.sample_pair(GaussianNoiseSpec())
        assert "synth_" in str(info.value)
