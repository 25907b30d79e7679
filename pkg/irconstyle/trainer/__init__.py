"""
Training, evaluation and ablation pipeline
"""

from .ablation import AblationReport, run_ablation, variant_config
from .checkpoint import Checkpoint
from .config import Ablation, LossWeights, TrainConfig, load_config, parse_config
from .engine import IRConStyleModel, LossBreakdown, TrainState, build_model, infer, infer_image, train_step
from .evaluate import evaluate
from .loop import train
from .optimizer import adamw_step, build_optimizer
from .schedule import cosine_lr

__all__ = [
    'Ablation',
    'AblationReport',
    'Checkpoint',
    'IRConStyleModel',
    'LossBreakdown',
    'LossWeights',
    'TrainConfig',
    'TrainState',
    'adamw_step',
    'build_model',
    'build_optimizer',
    'cosine_lr',
    'evaluate',
    'infer',
    'infer_image',
    'load_config',
    'parse_config',
    'run_ablation',
    'train',
    'train_step',
    'variant_config',
]
