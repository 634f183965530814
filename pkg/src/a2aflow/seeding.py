"""Named deterministic random substreams.

All randomness in the package flows from one root seed through named
substreams, so that e.g. data generation and weight initialization can be
varied independently without perturbing each other.
"""

import zlib

import numpy as np


def _token(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    return zlib.crc32(str(part).encode("utf-8"))


def substream(seed: int, *path) -> np.random.Generator:
    """Generator for the substream identified by ``path`` under ``seed``."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [_token(p) for p in path]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def subseed(seed: int, *path) -> int:
    """A 64-bit seed derived from a named substream (for nested components)."""
    return int(substream(seed, *path).integers(0, 2**63 - 1))
