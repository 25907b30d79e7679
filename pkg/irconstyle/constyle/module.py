"""
ConStyle: encoder, momentum encoder and negative queue owned together
"""

import torch
from torch import nn

from irconstyle.constyle.config import ConStyleConfig
from irconstyle.constyle.encoder import (
    ConStyleEncoder,
    LatentBundle,
    ema_update,
    encode,
    make_momentum_encoder,
)
from irconstyle.constyle.queue import NegativeQueue


class ConStyle(nn.Module):
    """Contrastive auxiliary module feeding latent features to the restoration net"""

    def __init__(self, config: ConStyleConfig):
        super().__init__()
        self.config = config
        self.encoder = ConStyleEncoder(config)
        self.momentum = make_momentum_encoder(self.encoder)
        self.queue = NegativeQueue(config.queue_capacity, config.latent_dim)

    def query(self, degraded: torch.Tensor) -> LatentBundle:
        """Encoder pass on degraded images: q plus feature maps"""
        return encode(self.encoder, degraded)

    @torch.no_grad()
    def key_for(self, images: torch.Tensor) -> torch.Tensor:
        """Momentum-encoder code for `images` (k for clean, k' for degraded)"""
        return encode(self.momentum, images).code

    def momentum_step(self) -> None:
        ema_update(self.momentum, self.encoder, self.config.ema_momentum)
