from .container import Episode, read_container, write_container
from .chunks import ChunkSample, NormStats, denormalize, extract_chunks, normalize

__all__ = [
    "Episode",
    "read_container",
    "write_container",
    "ChunkSample",
    "NormStats",
    "extract_chunks",
    "normalize",
    "denormalize",
]
