"""Policy checkpoint serialization.

Layout (all integers little-endian):

    magic   4 bytes "A2AC"
    u32     version (currently 1)
    u32     blob length, then UTF-8 JSON blob {"config": <train config>, "epoch": N}
    2*d     float32: per-dimension (lo, hi) normalization pairs
    u32     tensor count
    per tensor:
        u32     name length, UTF-8 name
        u32     rank
        u32     extent per axis
        float32 data, C order

Loading a saved checkpoint reproduces inference bit-for-bit.
"""

import io
import json
import struct
from dataclasses import dataclass

import numpy as np

from ..data import NormStats
from ..errors import CheckpointError, VersionError
from ..policy import Policy, TrainConfig
from ..policy.config import config_hash, config_to_dict, train_config_from_dict
from ..seeding import substream

MAGIC = b"A2AC"
VERSION = 1


@dataclass
class Checkpoint:
    config: TrainConfig
    epoch: int
    stats: NormStats
    params: dict  # name -> float32 ndarray

    @property
    def hash(self) -> str:
        return config_hash(config_to_dict(self.config))


def save_checkpoint(path, config, epoch: int, stats: NormStats, params: dict,
                    kind: str = "policy"):
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<I", VERSION))
    blob = json.dumps(
        {"kind": kind, "config": config_to_dict(config), "epoch": epoch}
    ).encode("utf-8")
    buf.write(struct.pack("<I", len(blob)))
    buf.write(blob)
    pairs = np.stack([stats.lo, stats.hi], axis=1).astype("<f4")
    buf.write(pairs.tobytes())
    buf.write(struct.pack("<I", len(params)))
    for name, arr in params.items():
        encoded = name.encode("utf-8")
        buf.write(struct.pack("<I", len(encoded)))
        buf.write(encoded)
        arr = np.ascontiguousarray(arr, dtype="<f4")
        buf.write(struct.pack("<I", arr.ndim))
        buf.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        buf.write(arr.tobytes())
    with open(path, "wb") as fh:
        fh.write(buf.getvalue())


def load_checkpoint(path, kind: str = "policy",
                    parse_config=train_config_from_dict,
                    stats_dims=lambda cfg: cfg.policy.action_dim) -> Checkpoint:
    with open(path, "rb") as fh:
        data = fh.read()
    pos = 0

    def take(n):
        nonlocal pos
        if pos + n > len(data):
            raise CheckpointError(f"checkpoint truncated at offset {pos}")
        out = data[pos : pos + n]
        pos += n
        return out

    if take(4) != MAGIC:
        raise CheckpointError("not a policy checkpoint (bad magic)")
    (version,) = struct.unpack("<I", take(4))
    if version != VERSION:
        raise VersionError(f"unsupported checkpoint version {version}")
    (blob_len,) = struct.unpack("<I", take(4))
    meta = json.loads(take(blob_len).decode("utf-8"))
    if meta.get("kind", "policy") != kind:
        raise CheckpointError(
            f"checkpoint holds a {meta.get('kind', 'policy')!r} model, expected {kind!r}"
        )
    config = parse_config(meta["config"])
    d = stats_dims(config)
    pairs = np.frombuffer(take(8 * d), dtype="<f4").reshape(d, 2)
    stats = NormStats(lo=pairs[:, 0].copy(), hi=pairs[:, 1].copy())
    (count,) = struct.unpack("<I", take(4))
    params = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<I", take(4))
        name = take(name_len).decode("utf-8")
        (rank,) = struct.unpack("<I", take(4))
        shape = struct.unpack(f"<{rank}I", take(4 * rank))
        size = int(np.prod(shape)) if rank else 1
        arr = np.frombuffer(take(4 * size), dtype="<f4").reshape(shape).copy()
        params[name] = arr
    if pos != len(data):
        raise CheckpointError(f"{len(data) - pos} trailing bytes in checkpoint")
    return Checkpoint(config=config, epoch=meta["epoch"], stats=stats, params=params)


def build_policy(ckpt: Checkpoint) -> Policy:
    """Instantiate the policy a checkpoint describes and load its weights."""
    policy = Policy(ckpt.config.policy, substream(0, "rebuild"), stats=ckpt.stats)
    policy.load_param_arrays(ckpt.params)
    return policy
