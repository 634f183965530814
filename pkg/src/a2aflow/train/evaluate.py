"""Closed-loop evaluation rollouts and inference-latency benchmarking."""

import time
from dataclasses import dataclass, field

import numpy as np

from ..seeding import subseed, substream
from ..sim import ArmEnv, RenderSpec, judge_success, render
from ..sim.expert import sample_episode_setup
from .metrics import MetricRecord

EVAL_BUDGET = 96


@dataclass
class EvalResult:
    successes: list
    latencies_us: list
    level: int
    k_steps: int
    sigma_init: float

    @property
    def success_rate(self) -> float:
        return float(np.mean(self.successes)) if self.successes else 0.0

    @property
    def mean_latency_us(self) -> float:
        return float(np.mean(self.latencies_us)) if self.latencies_us else 0.0

    @property
    def p99_latency_us(self) -> float:
        return float(np.percentile(self.latencies_us, 99)) if self.latencies_us else 0.0

    def record(self, run_id="", algo="", config_hash="", epoch=None) -> MetricRecord:
        return MetricRecord(
            run_id=run_id, algo=algo, config_hash=config_hash, epoch=epoch,
            level=self.level, k_steps=self.k_steps, sigma_init=self.sigma_init,
            episodes=len(self.successes), success_rate=self.success_rate,
            mean_latency_us=self.mean_latency_us, p99_latency_us=self.p99_latency_us,
        )


def rollout_episode(policy, ep_seed: int, level: int, k_steps: int, sigma_init: float = 0.0,
                    budget: int = EVAL_BUDGET, replan_stride: int = None,
                    history_noise: bool = False):
    """Run one seeded closed-loop episode; returns (success, chunk latencies in us)."""
    cfg = policy.cfg
    setup = sample_episode_setup(ep_seed)
    start = setup.start.copy()
    if sigma_init > 0.0:
        start = start + substream(ep_seed, "init-noise").normal(0.0, sigma_init, size=2)
    env = ArmEnv()
    env.reset(start, setup.target)
    spec = RenderSpec(level=level, seed=subseed(ep_seed, "render"))

    hold = np.array([*env.state.joints, 0.0], dtype=np.float32)
    history = np.tile(hold, (cfg.n, 1))
    first_frame = render(env.state, spec)
    frames = np.tile(first_frame, (cfg.m, 1, 1))

    stride = replan_stride or cfg.n
    joints_trace, grip_trace, latencies = [], [], []
    steps = 0
    chunk_idx = 0
    while steps < budget:
        rng = substream(ep_seed, "gen", chunk_idx)
        t0 = time.perf_counter_ns()
        chunk = policy.generate_chunk(history, frames, k_steps, rng=rng,
                                      history_noise=history_noise)
        latencies.append((time.perf_counter_ns() - t0) / 1e3)
        chunk_idx += 1
        for action in chunk[:stride]:
            if steps >= budget:
                break
            frames = np.concatenate([frames[1:], render(env.state, spec)[None]])
            state = env.step(action)
            history = np.concatenate(
                [history[1:], np.asarray(action, dtype=np.float32)[None]]
            )
            joints_trace.append(state.joints.copy())
            grip_trace.append(state.gripper)
            steps += 1
    success = judge_success(joints_trace, grip_trace, setup.target)
    return success, latencies


def rollout_eval(policy, episodes: int, level: int, k_steps: int, sigma_init: float = 0.0,
                 seed: int = 0, budget: int = EVAL_BUDGET, replan_stride: int = None,
                 history_noise: bool = False) -> EvalResult:
    """Aggregate success over seeded episodes. Pure function of its arguments."""
    result = EvalResult(successes=[], latencies_us=[], level=level, k_steps=k_steps,
                        sigma_init=sigma_init)
    for i in range(episodes):
        ep_seed = subseed(seed, "eval-ep", i)
        ok, lat = rollout_episode(
            policy, ep_seed, level, k_steps, sigma_init, budget, replan_stride,
            history_noise,
        )
        result.successes.append(bool(ok))
        result.latencies_us.extend(lat)
    return result


@dataclass
class LatencyRow:
    k_steps: int
    mean_us: float
    p99_us: float
    samples: int = 0

    def record(self, run_id="", algo="", config_hash="") -> MetricRecord:
        return MetricRecord(
            run_id=run_id, algo=algo, config_hash=config_hash, k_steps=self.k_steps,
            episodes=self.samples, mean_latency_us=self.mean_us, p99_latency_us=self.p99_us,
        )


def bench_latency(policy, steps_list, repeats: int = 50, warmup: int = 5,
                  groups: int = 5) -> list:
    """Wall-clock per chunk generation on fixed inputs, per step count.

    Mean is reported as a median of group means to damp scheduler noise; the
    p99 is the empirical percentile over all repeats.
    """
    cfg = policy.cfg
    rng = substream(7, "bench-inputs")
    history = rng.uniform(-0.5, 0.5, size=(cfg.n, cfg.action_dim)).astype(np.float32)
    frames = rng.integers(0, 256, size=(cfg.m, cfg.image_height, cfg.image_width)).astype(
        np.uint8
    )
    rows = []
    for k in steps_list:
        for _ in range(warmup):
            policy.generate_chunk(history, frames, k)
        times = np.empty(repeats)
        for i in range(repeats):
            t0 = time.perf_counter_ns()
            policy.generate_chunk(history, frames, k)
            times[i] = (time.perf_counter_ns() - t0) / 1e3
        chunks = np.array_split(times, groups)
        mean_us = float(np.median([c.mean() for c in chunks if len(c)]))
        rows.append(LatencyRow(k_steps=k, mean_us=mean_us,
                               p99_us=float(np.percentile(times, 99)), samples=repeats))
    return rows
