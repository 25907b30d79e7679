"""
Shared fixtures: tiny configurations and on-disk synthetic corpora
"""

import json
import os
from pathlib import Path

import pytest
import torch

from irconstyle.constyle import ConStyleConfig
from irconstyle.degradations import write_corpus
from irconstyle.restoration import NetConfig
from irconstyle.trainer import TrainConfig

RUN_PROBES = os.getenv("CONSTYLE_RUN_PROBES") == "1"


def tiny_net_config(**overrides) -> NetConfig:
    fields = dict(width=4, levels=3, blocks_left=[1, 1, 1], blocks_bottom=1, blocks_right=[1, 1, 1])
    fields.update(overrides)
    return NetConfig(**fields)


def tiny_constyle_config(**overrides) -> ConStyleConfig:
    fields = dict(width=4, latent_dim=8, head_width=8, mlp_hidden=16, queue_capacity=64)
    fields.update(overrides)
    return ConStyleConfig(**fields)


def tiny_train_config(**overrides) -> TrainConfig:
    fields = dict(
        patch=16,
        batch=2,
        total_iters=4,
        queue_capacity=64,
        net=tiny_net_config(),
        constyle=tiny_constyle_config(),
        checkpoint_every=2,
        log_every=1,
    )
    fields.update(overrides)
    return TrainConfig(**fields)


@pytest.fixture
def generator():
    return torch.Generator().manual_seed(1234)


@pytest.fixture
def corpus(tmp_path) -> Path:
    """Four 32x32 synthetic PNGs; returns the manifest path"""
    return write_corpus(tmp_path / "corpus", count=4, size=32, seed=7)


@pytest.fixture
def tiny_cfg(corpus) -> TrainConfig:
    return tiny_train_config(train_manifest=str(corpus), eval_manifest=str(corpus))


@pytest.fixture
def config_file(tmp_path, corpus) -> Path:
    """Tiny training config on disk, manifests given relative to the config file"""
    data = json.loads(tiny_train_config().to_json())
    data.pop("output_dir")
    data["train_manifest"] = "corpus/manifest.txt"
    data["eval_manifest"] = "corpus/manifest.txt"
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path
