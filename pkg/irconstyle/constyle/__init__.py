"""
ConStyle contrastive module
"""

from .config import ConStyleConfig
from .encoder import ConStyleEncoder, LatentBundle, ema_update, encode, make_momentum_encoder
from .losses import StyleLoss, content_loss, gram_distance, info_nce, style_loss
from .module import ConStyle
from .queue import NegativeQueue

__all__ = [
    'ConStyle',
    'ConStyleConfig',
    'ConStyleEncoder',
    'LatentBundle',
    'NegativeQueue',
    'StyleLoss',
    'content_loss',
    'ema_update',
    'encode',
    'gram_distance',
    'info_nce',
    'make_momentum_encoder',
    'style_loss',
]
