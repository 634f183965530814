"""Seeded minibatch training loop with snapshots and optional periodic eval."""

from dataclasses import dataclass, field

import numpy as np

from ..data import NormStats, normalize
from ..data.chunks import chunk_anchors
from ..errors import TrainingError
from ..nn import Adam
from ..policy import Policy, TrainConfig
from ..policy.config import config_hash, config_to_dict
from ..seeding import substream
from .metrics import MetricRecord


@dataclass
class TrainOutput:
    policy: Policy
    stats: NormStats
    config: TrainConfig
    metrics: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)  # epoch -> {name: array copy}
    final_epoch: int = 0


def _chunk_index(episodes, n, m, stride):
    index = []
    for ei, ep in enumerate(episodes):
        for t in chunk_anchors(ep.actions.shape[0], n, m, stride):
            index.append((ei, t))
    return index


def train(cfg: TrainConfig, episodes, snapshot_epochs=(), run_id="train",
          start_policy: Policy = None, start_epoch: int = 0) -> TrainOutput:
    """Train a policy on demonstration episodes.

    snapshot_epochs: parameter copies are stored after these epochs.
    start_policy/start_epoch: resume training from an existing policy.
    """
    pcfg = cfg.policy
    stats = (start_policy.stats if start_policy is not None
             else NormStats.from_actions([ep.actions for ep in episodes]))
    normed = [normalize(ep.actions, stats) for ep in episodes]
    frames = [ep.frames for ep in episodes]
    index = _chunk_index(episodes, pcfg.n, pcfg.m, cfg.chunk_stride)
    if not index and cfg.epochs > start_epoch:
        raise TrainingError("dataset yields no chunks under this configuration")

    policy = start_policy or Policy.init(pcfg, seed=cfg.seed, stats=stats)
    opt = Adam(policy.named_parameters(), lr=cfg.lr)
    out = TrainOutput(policy=policy, stats=stats, config=cfg, final_epoch=start_epoch)
    chash = config_hash(config_to_dict(cfg))
    if 0 in snapshot_epochs:
        out.snapshots[0] = {k: v.copy() for k, v in policy.param_arrays().items()}

    n, m = pcfg.n, pcfg.m
    for epoch in range(start_epoch + 1, cfg.epochs + 1):
        order = substream(cfg.seed, "shuffle", epoch).permutation(len(index))
        rng = substream(cfg.seed, "batch", epoch)
        sums = {"loss_fm": 0.0, "loss_ae": 0.0, "loss_ic": 0.0, "loss_total": 0.0}
        batches = 0
        for lo in range(0, len(order), cfg.batch_size):
            sel = [index[i] for i in order[lo : lo + cfg.batch_size]]
            hist = np.stack([normed[ei][t - n + 1 : t + 1] for ei, t in sel])
            fut = np.stack([normed[ei][t + 1 : t + n + 1] for ei, t in sel])
            obs = np.stack([frames[ei][t - m + 1 : t + 1] for ei, t in sel])
            total, parts = policy.loss_batch(hist, obs, fut, rng)
            if not np.isfinite(parts["loss_total"]):
                raise TrainingError(
                    f"non-finite loss at epoch {epoch} batch {batches}: {parts}"
                )
            opt.zero_grad()
            total.backward()
            opt.step()
            for k in sums:
                sums[k] += parts[k]
            batches += 1

        out.metrics.append(
            MetricRecord(
                run_id=run_id, algo=pcfg.algo, config_hash=chash, epoch=epoch,
                loss_fm=sums["loss_fm"] / batches, loss_ae=sums["loss_ae"] / batches,
                loss_ic=sums["loss_ic"] / batches, loss_total=sums["loss_total"] / batches,
            )
        )
        if epoch in snapshot_epochs:
            out.snapshots[epoch] = {k: v.copy() for k, v in policy.param_arrays().items()}
        if cfg.eval_cadence and epoch % cfg.eval_cadence == 0:
            from .evaluate import rollout_eval

            res = rollout_eval(
                policy, episodes=cfg.eval_episodes, level=0, k_steps=cfg.eval_k,
                seed=substream(cfg.seed, "probe").integers(2**31),
                replan_stride=cfg.replan_stride or None,
            )
            out.metrics.append(res.record(run_id=run_id, algo=pcfg.algo,
                                          config_hash=chash, epoch=epoch))
        out.final_epoch = epoch
    return out
