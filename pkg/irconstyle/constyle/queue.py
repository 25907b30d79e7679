"""
Fixed-capacity FIFO of latent codes used as negative samples
"""

from typing import Optional, Tuple

import torch

from irconstyle.errors import DimensionError
from irconstyle.tensor_engine import ops

OutgoingPair = Tuple[Optional[torch.Tensor], Optional[torch.Tensor]]


class NegativeQueue:
    """
    Ring buffer of unit-norm codes in strict FIFO order

    After a push of B codes, let V be the evicted codes followed by the
    resident ones (oldest first). q1 is V[0:B] and q2 is V[B:2B]; both are
    absent while V holds fewer than 2B codes. In steady state q1 is the batch
    that just came out of the queue and q2 the batch about to come out.
    """

    def __init__(self, capacity: int, dim: int, dtype: torch.dtype = torch.float32):
        if capacity < 1:
            raise DimensionError(f"queue capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.dim = dim
        self._buffer = torch.zeros(capacity, dim, dtype=dtype)
        self._head = 0  # index of the oldest code
        self._length = 0

    def __len__(self) -> int:
        return self._length

    def contents(self) -> torch.Tensor:
        """All resident codes, oldest first, as an (L, d) tensor"""
        idx = (self._head + torch.arange(self._length)) % self.capacity
        return self._buffer[idx].clone()

    def _oldest(self, count: int) -> torch.Tensor:
        count = min(count, self._length)
        idx = (self._head + torch.arange(count)) % self.capacity
        return self._buffer[idx]

    def negatives(self) -> torch.Tensor:
        """Resident codes for the contrastive denominator (no gradient path)"""
        return self.contents()

    def _check(self, codes: torch.Tensor) -> None:
        if codes.dim() != 2 or codes.shape[1] != self.dim:
            raise DimensionError(f"queue holds codes of dim {self.dim}, got shape {tuple(codes.shape)}")
        ops.check_unit_norm(codes, op="queue push")

    def _outgoing(self, codes: torch.Tensor) -> OutgoingPair:
        batch = codes.shape[0]
        oldest = self._oldest(2 * batch)
        virtual = torch.cat([oldest, codes.detach().to(self._buffer.dtype)], dim=0)
        if virtual.shape[0] < 2 * batch:
            return None, None
        return virtual[:batch].clone(), virtual[batch:2 * batch].clone()

    def preview(self, codes: torch.Tensor) -> OutgoingPair:
        """q1/q2 that push(codes) would return, without mutating the queue"""
        self._check(codes)
        return self._outgoing(codes)

    def push(self, codes: torch.Tensor) -> OutgoingPair:
        """
        Append a batch of codes, evicting the oldest ones beyond capacity

        Args:
            codes: Tensor (B, d) of unit-norm rows

        Returns:
            (q1, q2), each (B, d) or None while the queue is underfull
        """
        self._check(codes)
        pair = self._outgoing(codes)
        rows = codes.detach().to(self._buffer.dtype)
        if rows.shape[0] > self.capacity:
            # Only the newest `capacity` rows can stay resident
            self._head = 0
            self._length = 0
            rows = rows[-self.capacity:]
        for row in rows:
            if self._length == self.capacity:
                self._buffer[self._head] = row
                self._head = (self._head + 1) % self.capacity
            else:
                self._buffer[(self._head + self._length) % self.capacity] = row
                self._length += 1
        return pair

    def load(self, rows: torch.Tensor) -> None:
        """Replace the contents with `rows` (oldest first), e.g. from a checkpoint"""
        if rows.dim() != 2 or rows.shape[1] != self.dim or rows.shape[0] > self.capacity:
            raise DimensionError(
                f"cannot load {tuple(rows.shape)} into queue of capacity {self.capacity}, dim {self.dim}"
            )
        self._buffer.zero_()
        self._buffer[:rows.shape[0]] = rows.to(self._buffer.dtype)
        self._head = 0
        self._length = rows.shape[0]
