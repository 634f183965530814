"""Bit-exact binary container for demonstration episodes.

Layout (all integers little-endian):

    magic   4 bytes  "A2AD"
    u32     format version (currently 1)
    u32     episode count
    u32     action dim d
    u32     width, u32 height, u32 channels
    per episode:
        u64     seed
        u32     level
        u32     T
        T*d     float32 actions
        T*H*W*C uint8 frames

Write -> read round trips are byte-identical. Unknown future versions are
rejected. Truncation and bad magic raise distinct errors.
"""

import io
import struct
from dataclasses import dataclass

import numpy as np

from ..errors import BadMagicError, ConfigError, TruncatedError, VersionError

MAGIC = b"A2AD"
VERSION = 1
DEFAULT_TASK_ID = "reach"


@dataclass
class Episode:
    actions: np.ndarray  # (T, d) float32
    frames: np.ndarray  # (T, H, W) uint8 (single channel) or (T, H, W, C)
    seed: int
    level: int
    task_id: str = DEFAULT_TASK_ID

    @property
    def length(self) -> int:
        return self.frames.shape[0]

    def frame_shape(self):
        if self.frames.ndim == 3:
            h, w = self.frames.shape[1:]
            return h, w, 1
        h, w, c = self.frames.shape[1:]
        return h, w, c


def _frame_dims(episodes):
    if not episodes:
        return 3, 32, 32, 1
    h, w, c = episodes[0].frame_shape()
    d = episodes[0].actions.shape[1] if episodes[0].actions.ndim == 2 else 0
    for ep in episodes:
        ed = ep.actions.shape[1] if ep.actions.ndim == 2 else 0
        if ep.frame_shape() != (h, w, c) or ed != d:
            raise ConfigError("inconsistent episode dimensions in container")
        if ep.actions.ndim == 2 and ep.actions.shape[0] != ep.frames.shape[0]:
            raise ConfigError("episode action count differs from frame count")
    return d, w, h, c


def write_container(episodes) -> bytes:
    episodes = list(episodes)
    d, w, h, c = _frame_dims(episodes)
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<IIIIII", VERSION, len(episodes), d, w, h, c))
    for ep in episodes:
        t = ep.length
        buf.write(struct.pack("<QII", ep.seed & 0xFFFFFFFFFFFFFFFF, ep.level, t))
        if d:
            buf.write(np.ascontiguousarray(ep.actions, dtype="<f4").tobytes())
        buf.write(np.ascontiguousarray(ep.frames, dtype=np.uint8).tobytes())
    return buf.getvalue()


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedError(
                f"container truncated: needed {n} bytes at offset {self.pos}, "
                f"file has {len(self.data)}"
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def read_container(data: bytes):
    rd = _Reader(data)
    if rd.take(4) != MAGIC:
        raise BadMagicError("not a demonstration container (bad magic)")
    version, count, d, w, h, c = rd.unpack("<IIIIII")
    if version != VERSION:
        raise VersionError(f"unsupported container version {version} (supported: {VERSION})")
    episodes = []
    for _ in range(count):
        seed, level, t = rd.unpack("<QII")
        actions = np.frombuffer(rd.take(4 * t * d), dtype="<f4").reshape(t, d).copy() \
            if d else np.zeros((t, 0), dtype=np.float32)
        frames = np.frombuffer(rd.take(t * h * w * c), dtype=np.uint8)
        frames = frames.reshape((t, h, w) if c == 1 else (t, h, w, c)).copy()
        episodes.append(Episode(actions=actions, frames=frames, seed=seed, level=level))
    if rd.pos != len(data):
        raise TruncatedError(
            f"{len(data) - rd.pos} trailing bytes after the last declared episode"
        )
    return episodes
