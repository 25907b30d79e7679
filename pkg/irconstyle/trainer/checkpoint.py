"""
Little-endian binary checkpoints

Layout:
    8-byte magic "CSTYLCKP", u32 version, u64 tensor count
    per tensor: u32 name length, UTF-8 name, u8 rank, u64 dims, raw float32 data
    queue block: u64 capacity, u64 length, u32 dim, float32 rows (FIFO order)
    u64 iteration
    u64 config length, UTF-8 JSON config echo
"""

import io
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Dict, Union

import numpy as np
import torch

from irconstyle.errors import CheckpointError, CheckpointVersionError

logger = logging.getLogger(__name__)

MAGIC = b"CSTYLCKP"
VERSION = 1
_F32 = np.dtype("<f4")


@dataclass
class Checkpoint:
    """Everything needed to resume training bit-exactly"""

    tensors: Dict[str, torch.Tensor] = field(default_factory=dict)
    queue_capacity: int = 0
    queue_rows: torch.Tensor = field(default_factory=lambda: torch.zeros(0, 0))
    iteration: int = 0
    config_json: str = "{}"


def _read(stream: BinaryIO, fmt: str):
    size = struct.calcsize(fmt)
    raw = stream.read(size)
    if len(raw) != size:
        raise CheckpointError("checkpoint truncated")
    return struct.unpack(fmt, raw)


def _read_bytes(stream: BinaryIO, count: int) -> bytes:
    raw = stream.read(count)
    if len(raw) != count:
        raise CheckpointError("checkpoint truncated")
    return raw


def _write_array(stream: BinaryIO, tensor: torch.Tensor) -> None:
    stream.write(tensor.detach().cpu().to(torch.float32).contiguous().numpy().astype(_F32, copy=False).tobytes())


def dumps(ckpt: Checkpoint) -> bytes:
    stream = io.BytesIO()
    stream.write(MAGIC)
    stream.write(struct.pack("<IQ", VERSION, len(ckpt.tensors)))
    for name, tensor in ckpt.tensors.items():
        encoded = name.encode("utf-8")
        stream.write(struct.pack("<I", len(encoded)))
        stream.write(encoded)
        stream.write(struct.pack("<B", tensor.dim()))
        stream.write(struct.pack(f"<{tensor.dim()}Q", *tensor.shape))
        _write_array(stream, tensor)

    rows = ckpt.queue_rows
    dim = rows.shape[1] if rows.dim() == 2 else 0
    stream.write(struct.pack("<QQI", ckpt.queue_capacity, rows.shape[0], dim))
    if rows.numel():
        _write_array(stream, rows)

    stream.write(struct.pack("<Q", ckpt.iteration))
    config = ckpt.config_json.encode("utf-8")
    stream.write(struct.pack("<Q", len(config)))
    stream.write(config)
    return stream.getvalue()


def loads(data: bytes) -> Checkpoint:
    stream = io.BytesIO(data)
    if stream.read(len(MAGIC)) != MAGIC:
        raise CheckpointError("not a ConStyle checkpoint (bad magic)")
    version, count = _read(stream, "<IQ")
    if version != VERSION:
        raise CheckpointVersionError(f"checkpoint version {version} unsupported (expected {VERSION})")

    tensors: Dict[str, torch.Tensor] = {}
    for _ in range(count):
        (name_len,) = _read(stream, "<I")
        name = _read_bytes(stream, name_len).decode("utf-8")
        (rank,) = _read(stream, "<B")
        shape = _read(stream, f"<{rank}Q") if rank else ()
        numel = int(np.prod(shape)) if shape else 1
        values = np.frombuffer(_read_bytes(stream, 4 * numel), dtype=_F32)
        tensors[name] = torch.from_numpy(values.astype(np.float32)).reshape(shape)

    capacity, length, dim = _read(stream, "<QQI")
    rows = np.frombuffer(_read_bytes(stream, 4 * length * dim), dtype=_F32)
    queue_rows = torch.from_numpy(rows.astype(np.float32)).reshape(length, dim)

    (iteration,) = _read(stream, "<Q")
    (config_len,) = _read(stream, "<Q")
    config_json = _read_bytes(stream, config_len).decode("utf-8")
    return Checkpoint(tensors, capacity, queue_rows, iteration, config_json)


def save(path: Union[str, Path], ckpt: Checkpoint) -> Path:
    """Write atomically via a temporary sibling file"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(dumps(ckpt))
    tmp.replace(path)
    logger.info("saved checkpoint %s (iteration %d)", path, ckpt.iteration)
    return path


def load(path: Union[str, Path]) -> Checkpoint:
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    return loads(data)
