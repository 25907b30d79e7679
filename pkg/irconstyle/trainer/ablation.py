"""
Guideline and loss-term ablations under identical seeds
"""

import logging
import math
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import BaseModel

from irconstyle.errors import ConfigError
from irconstyle.metrics import MetricReport
from irconstyle.trainer.config import TrainConfig
from irconstyle.trainer.evaluate import evaluate
from irconstyle.trainer.loop import DEFAULT_OUTPUT_DIR, train

logger = logging.getLogger(__name__)

GUIDELINE_VARIANTS: Dict[str, dict] = {
    "g1_small_queue": {"ablation": {"g1_small_queue": True}},
    "g2_no_feature_maps": {"ablation": {"g2_no_feature_maps": True}},
    "g3_queue_behind_momentum": {"ablation": {"g3_queue_behind_momentum": True}},
}

LOSS_VARIANTS: Dict[str, dict] = {
    "content_style_only": {"loss_weights": {"infonce": 0.0}},
    "infonce_only": {"loss_weights": {"content": 0.0, "style": 0.0}},
    "no_contrastive_losses": {"loss_weights": {"content": 0.0, "style": 0.0, "infonce": 0.0}},
}


class AblationReport(BaseModel):
    """Baseline and per-variant metrics plus the direction check"""

    baseline: MetricReport
    variants: Dict[str, MetricReport]
    baseline_not_worse: Dict[str, bool]
    ordering_holds: bool
    note: str = "ordering is informational; small-scale runs are stochastic"


def variant_config(base: TrainConfig, overrides: dict) -> TrainConfig:
    """Base config with nested field overrides applied"""
    data = base.model_dump()
    for section, values in overrides.items():
        data[section] = {**data[section], **values}
    return TrainConfig.model_validate(data)


def run_ablation(cfg: TrainConfig, output_dir: Optional[str] = None, threads: int = 1,
                 include_loss_ablations: bool = False) -> AblationReport:
    """
    Train the baseline and each single-change variant, then evaluate all of them

    Args:
        cfg: Base configuration (no ablation flags set)
        output_dir: Root for per-variant run directories
        threads: Data-loader threads
        include_loss_ablations: Also run the content/style/InfoNCE term ablations

    Returns:
        AblationReport; ordering failures are flagged, not raised
    """
    if not cfg.eval_manifest:
        raise ConfigError("ablation needs an eval_manifest", field="eval_manifest")
    if any(cfg.ablation.model_dump().values()):
        raise ConfigError("base config must not set ablation flags", field="ablation")
    root = Path(output_dir or cfg.output_dir or DEFAULT_OUTPUT_DIR)

    plans: Dict[str, TrainConfig] = {"baseline": cfg}
    variants = dict(GUIDELINE_VARIANTS)
    if include_loss_ablations:
        variants.update(LOSS_VARIANTS)
    for name, overrides in variants.items():
        plans[name] = variant_config(cfg, overrides)

    reports: Dict[str, MetricReport] = {}
    for name, plan in plans.items():
        logger.info("ablation variant %s", name)
        state = train(plan, threads=threads, output_dir=root / name)
        reports[name] = evaluate(state.model, plan.eval_manifest, plan.degradation, seed=plan.seed, name=name)

    baseline = reports.pop("baseline")
    not_worse = {name: _not_worse(baseline, report) for name, report in reports.items()}
    holds = all(not_worse.values())
    if not holds:
        failing: List[str] = [name for name, ok in not_worse.items() if not ok]
        logger.warning("baseline below variants %s (informational)", failing)
    return AblationReport(baseline=baseline, variants=reports, baseline_not_worse=not_worse, ordering_holds=holds)


def _not_worse(baseline: MetricReport, variant: MetricReport) -> bool:
    if math.isnan(baseline.psnr_db) or math.isnan(variant.psnr_db):
        return False
    return baseline.psnr_db >= variant.psnr_db
