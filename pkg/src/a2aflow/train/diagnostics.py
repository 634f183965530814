"""Latent-alignment diagnostics: pair distances, direction parallelism, 2-D PCA."""

import csv
from dataclasses import dataclass

import numpy as np


@dataclass
class DiagnosticsResult:
    pair_dists: np.ndarray  # (N,) ||z0 - z1|| per pair
    mean_pairwise_cos: float  # parallelism of the (z1 - z0) directions
    pca_history: np.ndarray  # (N, 2)
    pca_future: np.ndarray  # (N, 2)

    @property
    def mean_dist(self) -> float:
        return float(self.pair_dists.mean())


def analyze_latents(z0: np.ndarray, z1: np.ndarray) -> DiagnosticsResult:
    z0 = np.asarray(z0, dtype=np.float64)
    z1 = np.asarray(z1, dtype=np.float64)
    deltas = z1 - z0
    dists = np.linalg.norm(deltas, axis=1)

    norms = np.where(dists > 1e-12, dists, 1.0)
    dirs = deltas / norms[:, None]
    gram = dirs @ dirs.T
    n = len(dists)
    mean_cos = float((gram.sum() - np.trace(gram)) / (n * n - n)) if n > 1 else 1.0

    combined = np.vstack([z0, z1])
    centered = combined - combined.mean(axis=0, keepdims=True)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    coords = centered @ vt[:2].T
    return DiagnosticsResult(
        pair_dists=dists,
        mean_pairwise_cos=mean_cos,
        pca_history=coords[:n],
        pca_future=coords[n:],
    )


def latent_diagnostics(policy, histories, futures) -> DiagnosticsResult:
    """Encode normalized history/future chunk arrays and analyze their latents."""
    z0 = policy.encode_actions(np.asarray(histories)).data
    z1 = policy.encode_actions(np.asarray(futures)).data
    return analyze_latents(z0, z1)


DIAG_HEADER = ["pair_id", "role", "pc1", "pc2", "pair_dist", "mean_pairwise_cos"]


def write_diagnostics_csv(path, result: DiagnosticsResult):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DIAG_HEADER)
        for role, coords in (("history", result.pca_history), ("future", result.pca_future)):
            for i, (x, y) in enumerate(coords):
                writer.writerow(
                    [i, role, repr(float(x)), repr(float(y)),
                     repr(float(result.pair_dists[i])), repr(result.mean_pairwise_cos)]
                )
