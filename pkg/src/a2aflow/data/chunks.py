"""Chunk extraction and action normalization.

A chunk pairs the n actions ending at anchor t (history), the m frames ending
at t (observation stack), and the n actions starting at t+1 (future). With
m <= n every T-step episode yields T - 2n + 1 chunks.

Actions are min-max normalized to [-1, 1] per dimension with statistics
computed on the training split only.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import StatsError


@dataclass
class ChunkSample:
    history: np.ndarray  # (n, d)
    obs: np.ndarray  # (m, H, W) uint8
    future: np.ndarray  # (n, d)
    anchor: int


def chunk_anchors(t_len: int, n: int, m: int, stride: int = 1):
    first = max(n, m) - 1
    last = t_len - 1 - n
    return range(first, last + 1, stride) if last >= first else range(0)


def extract_chunks(actions, frames, n: int, m: int, stride: int = 1):
    """All chunk samples of one episode; empty list when the episode is too short."""
    actions = np.asarray(actions)
    samples = []
    for t in chunk_anchors(actions.shape[0], n, m, stride):
        samples.append(
            ChunkSample(
                history=actions[t - n + 1 : t + 1],
                obs=frames[t - m + 1 : t + 1],
                future=actions[t + 1 : t + n + 1],
                anchor=t,
            )
        )
    return samples


@dataclass
class NormStats:
    lo: np.ndarray  # (d,)
    hi: np.ndarray  # (d,)

    def __post_init__(self):
        self.lo = np.asarray(self.lo, dtype=np.float32)
        self.hi = np.asarray(self.hi, dtype=np.float32)
        if self.lo.shape != self.hi.shape or np.any(self.hi <= self.lo):
            raise StatsError(
                f"normalization stats need hi > lo per dimension, got lo={self.lo} hi={self.hi}"
            )

    @classmethod
    def from_actions(cls, action_arrays):
        stacked = np.concatenate([np.asarray(a).reshape(-1, a.shape[-1])
                                  for a in action_arrays], axis=0)
        return cls(lo=stacked.min(axis=0), hi=stacked.max(axis=0))


def normalize(actions, stats: NormStats):
    span = stats.hi - stats.lo
    return (2.0 * (np.asarray(actions, dtype=np.float32) - stats.lo) / span - 1.0).astype(
        np.float32
    )


def denormalize(normed, stats: NormStats):
    span = stats.hi - stats.lo
    return (np.asarray(normed, dtype=np.float32) + 1.0) * 0.5 * span + stats.lo
