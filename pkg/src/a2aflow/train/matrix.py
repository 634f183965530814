"""Experiment matrix: (algo x epoch x level x steps x init-noise) sweeps.

Each algorithm is trained once up to its largest requested epoch with
snapshots at every requested epoch; snapshots are persisted as checkpoints in
the working directory so an interrupted matrix resumes without retraining.
Finished cells are skipped by key; rows append under a file lock in a fixed
cell order.
"""

import dataclasses
import os
from dataclasses import dataclass

from ..policy import TrainConfig
from ..policy.config import config_hash, config_to_dict
from ..seeding import subseed
from .checkpoint import build_policy, load_checkpoint, save_checkpoint
from .evaluate import rollout_eval
from .metrics import append_records, read_records
from .trainer import train


@dataclass(frozen=True)
class MatrixSpec:
    algos: tuple
    epochs: tuple
    k_steps: tuple
    levels: tuple = (0,)
    sigma_inits: tuple = (0.0,)
    episodes: int = 50
    seed: int = 0


def matrix_cells(spec: MatrixSpec):
    """Deterministically ordered cell keys."""
    return [
        (algo, epoch, level, k, sigma)
        for algo in sorted(spec.algos)
        for epoch in sorted(spec.epochs)
        for level in sorted(spec.levels)
        for k in sorted(spec.k_steps)
        for sigma in sorted(spec.sigma_inits)
    ]


def _cell_key(rec):
    return (rec.algo, rec.epoch, rec.level, rec.k_steps, rec.sigma_init)


def _ensure_checkpoints(spec, base_config: TrainConfig, episodes, workdir):
    paths = {}
    wanted = sorted(spec.epochs)
    for algo in sorted(spec.algos):
        algo_paths = {e: os.path.join(workdir, f"ckpt_{algo}_ep{e}.a2ac") for e in wanted}
        if not all(os.path.exists(p) for p in algo_paths.values()):
            cfg = dataclasses.replace(
                base_config,
                policy=dataclasses.replace(base_config.policy, algo=algo),
                epochs=max(wanted),
                seed=spec.seed,
            )
            out = train(cfg, episodes, snapshot_epochs=tuple(wanted), run_id=f"matrix-{algo}")
            for e in wanted:
                save_checkpoint(algo_paths[e], cfg, e, out.stats, out.snapshots[e])
        paths[algo] = algo_paths
    return paths


def run_experiment_matrix(spec: MatrixSpec, base_config: TrainConfig, episodes,
                          workdir, run_id="matrix") -> str:
    """Fill the matrix into workdir/results.csv; resumable by cell."""
    os.makedirs(workdir, exist_ok=True)
    results_path = os.path.join(workdir, "results.csv")
    done = set()
    if os.path.exists(results_path):
        done = {_cell_key(rec) for rec in read_records(results_path)}

    ckpts = _ensure_checkpoints(spec, base_config, episodes, workdir)
    policies = {}
    for cell in matrix_cells(spec):
        if cell in done:
            continue
        algo, epoch, level, k, sigma = cell
        if (algo, epoch) not in policies:
            ckpt = load_checkpoint(ckpts[algo][epoch])
            policies[(algo, epoch)] = (build_policy(ckpt), ckpt.hash)
        policy, chash = policies[(algo, epoch)]
        res = rollout_eval(
            policy, episodes=spec.episodes, level=level, k_steps=k, sigma_init=sigma,
            seed=subseed(spec.seed, "matrix", algo, epoch, level, k, sigma),
        )
        append_records(results_path,
                       [res.record(run_id=run_id, algo=algo, config_hash=chash, epoch=epoch)])
    return results_path
