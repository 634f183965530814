"""Command-line entry point.

Subcommands: gen-data, train, eval, bench, diagnose, video {gen-data,train,eval}.
Every invocation writes a manifest (full resolved config, seed, timestamps,
artifact paths, exit status) next to its outputs, and never writes outside
its --out location.

Exit codes: 0 ok, 2 usage/config error, 3 I/O error, 4 numeric failure,
5 version mismatch.
"""

import argparse
import dataclasses
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from .data import Episode, NormStats, normalize, read_container, write_container
from .data.chunks import extract_chunks
from .errors import (
    A2AError,
    CheckpointError,
    ConfigError,
    ContainerError,
    InputError,
    StatsError,
    TrainingError,
    VersionError,
)
from .policy import ALGOS
from .policy.config import config_hash, config_to_dict, train_config_from_dict
from .seeding import subseed
from .sim import expert_demo
from .train import (
    append_records,
    bench_latency,
    build_policy,
    latent_diagnostics,
    load_checkpoint,
    rollout_eval,
    save_checkpoint,
    train,
    write_diagnostics_csv,
    write_records,
)
from .video import gen_video_data
from .video.trainer import (
    f2f_config_from_dict,
    f2f_eval,
    f2f_predict,
    f2f_train,
    load_f2f_checkpoint,
    save_f2f_checkpoint,
)
from .video.metrics import frame_metrics

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4
EXIT_VERSION = 5


_ACTIVE_MANIFEST = None


class Manifest:
    def __init__(self, command, args_dict, seed, out):
        global _ACTIVE_MANIFEST
        _ACTIVE_MANIFEST = self
        self.data = {
            "command": command,
            "config": args_dict,
            "seed": seed,
            "start": datetime.now(timezone.utc).isoformat(),
            "end": None,
            "artifacts": [],
            "exit_status": None,
        }
        out = str(out)
        if os.path.splitext(out)[1]:
            self.path = out + ".manifest.json"
            os.makedirs(os.path.dirname(os.path.abspath(out)), exist_ok=True)
        else:
            os.makedirs(out, exist_ok=True)
            self.path = os.path.join(out, "manifest.json")

    def add(self, path, **extra):
        self.data["artifacts"].append(str(path))
        self.data.update(extra)

    def finish(self, status):
        self.data["end"] = datetime.now(timezone.utc).isoformat()
        self.data["exit_status"] = status
        with open(self.path, "w") as fh:
            json.dump(self.data, fh, indent=2, default=str)
            fh.write("\n")


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")


def _read_episodes(path):
    try:
        with open(path, "rb") as fh:
            return read_container(fh.read())
    except FileNotFoundError:
        raise ConfigError(f"data file not found: {path}")


# -- subcommands -------------------------------------------------------------


def cmd_gen_data(args):
    manifest = Manifest("gen-data", vars(args), args.seed, args.out)
    episodes = []
    for i in range(args.episodes):
        traj = expert_demo(subseed(args.seed, "episode", i), level=args.level)
        episodes.append(
            Episode(actions=traj.actions, frames=traj.frames, seed=traj.seed,
                    level=traj.level)
        )
    with open(args.out, "wb") as fh:
        fh.write(write_container(episodes))
    manifest.add(args.out, episodes=len(episodes))
    return manifest


def cmd_train(args):
    raw = _load_json(args.config)
    cfg = train_config_from_dict(raw)
    if args.algo is not None:
        cfg = dataclasses.replace(cfg, policy=dataclasses.replace(cfg.policy, algo=args.algo))
    if args.data is not None:
        cfg = dataclasses.replace(cfg, data_path=str(args.data))
    manifest = Manifest("train", config_to_dict(cfg), cfg.seed, args.out)
    episodes = _read_episodes(cfg.data_path)
    out = train(cfg, episodes, run_id=args.run_id)
    ckpt_path = os.path.join(args.out, "checkpoint.a2ac")
    save_checkpoint(ckpt_path, cfg, out.final_epoch, out.stats,
                    out.policy.param_arrays())
    metrics_path = os.path.join(args.out, "metrics.csv")
    write_records(metrics_path, out.metrics)
    manifest.add(ckpt_path, config_hash=config_hash(config_to_dict(cfg)))
    manifest.add(metrics_path)
    return manifest


def cmd_eval(args):
    ckpt = load_checkpoint(args.ckpt)
    manifest = Manifest("eval", {**vars(args), "config": config_to_dict(ckpt.config)},
                        args.seed, args.out)
    policy = build_policy(ckpt)
    res = rollout_eval(policy, episodes=args.episodes, level=args.level,
                       k_steps=args.steps, sigma_init=args.sigma_init, seed=args.seed,
                       history_noise=args.history_noise)
    path = os.path.join(args.out, "eval.csv")
    rows = [] if args.episodes == 0 else [
        res.record(run_id=args.run_id, algo=ckpt.config.policy.algo,
                   config_hash=ckpt.hash, epoch=ckpt.epoch)
    ]
    write_records(path, rows)
    manifest.add(path, success_rate=res.success_rate)
    return manifest


def cmd_bench(args):
    ckpt = load_checkpoint(args.ckpt)
    manifest = Manifest("bench", vars(args), 0, args.out)
    policy = build_policy(ckpt)
    steps = [int(s) for s in args.steps_list.split(",") if s]
    if not steps or any(k < 1 for k in steps):
        raise ConfigError(f"--steps-list must be positive ints, got {args.steps_list!r}")
    rows = bench_latency(policy, steps, repeats=args.repeats)
    path = os.path.join(args.out, "bench.csv")
    write_records(path, [r.record(run_id=args.run_id, algo=ckpt.config.policy.algo,
                                  config_hash=ckpt.hash) for r in rows])
    manifest.add(path)
    return manifest


def cmd_diagnose(args):
    ckpt = load_checkpoint(args.ckpt)
    manifest = Manifest("diagnose", vars(args), 0, args.out)
    policy = build_policy(ckpt)
    episodes = _read_episodes(args.data)
    n, m = ckpt.config.policy.n, ckpt.config.policy.m
    hist, fut = [], []
    for ep in episodes:
        for chunk in extract_chunks(normalize(ep.actions, ckpt.stats), ep.frames, n, m):
            hist.append(chunk.history)
            fut.append(chunk.future)
    if not hist:
        raise InputError("no chunks available for diagnostics")
    res = latent_diagnostics(policy, np.stack(hist), np.stack(fut))
    path = os.path.join(args.out, "diagnostics.csv")
    write_diagnostics_csv(path, res)
    manifest.add(path, mean_pair_dist=res.mean_dist,
                 mean_pairwise_cos=res.mean_pairwise_cos)
    return manifest


def cmd_video_gen_data(args):
    manifest = Manifest("video gen-data", vars(args), args.seed, args.out)
    episodes = gen_video_data(args.episodes, seed=args.seed)
    container = [
        Episode(actions=np.zeros((ep.frames.shape[0], 0), dtype=np.float32),
                frames=ep.frames, seed=ep.seed, level=0)
        for ep in episodes
    ]
    with open(args.out, "wb") as fh:
        fh.write(write_container(container))
    manifest.add(args.out, episodes=len(container))
    return manifest


def cmd_video_train(args):
    cfg = f2f_config_from_dict(_load_json(args.config))
    if args.algo is not None:
        cfg = dataclasses.replace(cfg, model=dataclasses.replace(cfg.model, algo=args.algo))
    manifest = Manifest("video train", config_to_dict(cfg), cfg.seed, args.out)
    episodes = _read_episodes(args.data)
    out = f2f_train(cfg, episodes)
    ckpt_path = os.path.join(args.out, "checkpoint.f2f")
    save_f2f_checkpoint(ckpt_path, cfg, cfg.epochs, out.model)
    manifest.add(ckpt_path, losses=out.losses[-1] if out.losses else None)
    return manifest


def cmd_video_eval(args):
    model, cfg, epoch = load_f2f_checkpoint(args.ckpt)
    manifest = Manifest("video eval", vars(args), 0, args.out)
    episodes = _read_episodes(args.data)
    f_in, f_out = cfg.model.frames_in, cfg.model.frames_out
    path = os.path.join(args.out, "video_metrics.csv")
    with open(path, "w") as fh:
        fh.write("run_id,algo,epoch,psnr,ssim,mse\n")
        scores = []
        for ep in episodes:
            t = ep.frames.shape[0] - f_out - 1
            hist = ep.frames[t - f_in + 1 : t + 1]
            truth = ep.frames[t + 1 : t + 1 + f_out]
            pred = f2f_predict(model, hist, args.steps)
            scores.extend(frame_metrics(p, g) for p, g in zip(pred, truth))
        if scores:
            mean = np.asarray(scores).mean(axis=0)
            fh.write(f"{args.run_id},{cfg.model.algo},{epoch},"
                     f"{mean[0]},{mean[1]},{mean[2]}\n")
    manifest.add(path)
    return manifest


# -- parser -------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="a2aflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate expert demonstration episodes")
    p.add_argument("--task", default="reach", choices=["reach"])
    p.add_argument("--episodes", type=int, required=True)
    p.add_argument("--level", type=int, default=0, choices=range(4))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen_data)

    p = sub.add_parser("train", help="train a policy")
    p.add_argument("--config", required=True)
    p.add_argument("--algo", choices=ALGOS, default=None)
    p.add_argument("--data", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--run-id", default="train")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval", help="closed-loop evaluation of a checkpoint")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--episodes", type=int, required=True)
    p.add_argument("--level", type=int, default=0, choices=range(4))
    p.add_argument("--steps", type=int, default=6)
    p.add_argument("--sigma-init", type=float, default=0.0)
    p.add_argument("--history-noise", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--run-id", default="eval")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("bench", help="inference latency benchmark")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--steps-list", default="1,2,4,6,10")
    p.add_argument("--repeats", type=int, default=50)
    p.add_argument("--out", required=True)
    p.add_argument("--run-id", default="bench")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("diagnose", help="latent-space diagnostics on a dataset")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_diagnose)

    video = sub.add_parser("video", help="frames-to-frames extension")
    vsub = video.add_subparsers(dest="video_command", required=True)

    p = vsub.add_parser("gen-data", help="generate bouncing-ball videos")
    p.add_argument("--episodes", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_video_gen_data)

    p = vsub.add_parser("train", help="train the video predictor")
    p.add_argument("--config", required=True)
    p.add_argument("--algo", choices=["flow", "regression"], default=None)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_video_train)

    p = vsub.add_parser("eval", help="frame-prediction metrics on a dataset")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--run-id", default="video-eval")
    p.set_defaults(fn=cmd_video_eval)

    return parser


def _exit_code(exc) -> int:
    if isinstance(exc, VersionError):
        return EXIT_VERSION
    if isinstance(exc, TrainingError):
        return EXIT_NUMERIC
    if isinstance(exc, (ConfigError, InputError, StatsError)):
        return EXIT_USAGE
    if isinstance(exc, (ContainerError, CheckpointError, OSError)):
        return EXIT_IO
    return EXIT_IO


def main(argv=None) -> int:
    global _ACTIVE_MANIFEST
    _ACTIVE_MANIFEST = None
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        manifest = args.fn(args)
        manifest.finish(EXIT_OK)
        return EXIT_OK
    except A2AError as exc:
        code = _exit_code(exc)
        print(f"error: {exc}", file=sys.stderr)
        if _ACTIVE_MANIFEST is not None:
            _ACTIVE_MANIFEST.finish(code)
        return code
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        if _ACTIVE_MANIFEST is not None:
            _ACTIVE_MANIFEST.finish(EXIT_IO)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
