"""
Iteration-budgeted training loop with periodic checkpoints and a JSON-lines loss log
"""

import json
import logging
import time
from pathlib import Path
from typing import Optional, Union

import torch

from irconstyle.degradations import PatchSampler, read_manifest
from irconstyle.errors import ConfigError
from irconstyle.trainer import checkpoint
from irconstyle.trainer.config import TrainConfig
from irconstyle.trainer.engine import TrainState, train_step

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = "runs/constyle"


def make_sampler(cfg: TrainConfig, threads: int = 1) -> PatchSampler:
    if not cfg.train_manifest:
        raise ConfigError("a train_manifest is required for training", field="train_manifest")
    return PatchSampler(read_manifest(cfg.train_manifest), patch=cfg.patch, augment=True,
                        seed=cfg.seed, threads=threads)


def enable_determinism() -> None:
    torch.use_deterministic_algorithms(True, warn_only=True)


def train(cfg: TrainConfig, resume: Optional[Union[str, Path]] = None, threads: int = 1,
          output_dir: Optional[Union[str, Path]] = None) -> TrainState:
    """
    Train for cfg.total_iters iterations

    Args:
        cfg: Training configuration
        resume: Checkpoint to continue from (its iteration counter is kept)
        threads: Data-loader threads
        output_dir: Overrides cfg.output_dir (which falls back to runs/constyle)

    Returns:
        Final training state; `final.ckpt` is written in the output directory
    """
    enable_determinism()
    out = Path(output_dir or cfg.output_dir or DEFAULT_OUTPUT_DIR)
    out.mkdir(parents=True, exist_ok=True)

    if resume is not None:
        state = TrainState.from_checkpoint(checkpoint.load(resume), cfg)
        logger.info("resuming from %s at iteration %d", resume, state.iteration)
    else:
        state = TrainState(cfg)

    sampler = make_sampler(cfg, threads)
    sampler.position = state.iteration * cfg.batch
    loss_log = out / "losses.jsonl"
    started = time.time()

    with loss_log.open("a", encoding="utf-8") as log_file:
        while state.iteration < cfg.total_iters:
            clean, degraded = sampler.batch(cfg.batch, cfg.degradation)
            breakdown = train_step(state, clean, degraded)
            record = {"iteration": state.iteration, **breakdown.to_dict()}
            log_file.write(json.dumps(record) + "\n")

            if state.iteration % cfg.log_every == 0 or state.iteration == cfg.total_iters:
                logger.info(
                    "iter %d/%d total %.5f l1 %.5f nce %.5f content %.5f style %.5f queue %d (%.1fs)",
                    state.iteration, cfg.total_iters, breakdown.total, breakdown.l1,
                    breakdown.infonce, breakdown.content, breakdown.style,
                    len(state.queue), time.time() - started,
                )
            if state.iteration % cfg.checkpoint_every == 0:
                checkpoint.save(out / f"iter_{state.iteration:07d}.ckpt", state.to_checkpoint())

    checkpoint.save(out / "final.ckpt", state.to_checkpoint())
    return state
