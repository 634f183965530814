"""Synthetic bouncing-ball videos for the frames-to-frames extension.

A single ball moves at constant speed and reflects elastically off the image
walls. Frames are anti-aliased discs on a black background, deterministic in
the scene seed.
"""

from dataclasses import dataclass

import numpy as np

from ..seeding import substream

T_VIDEO = 16
BALL_RADIUS = 3.0
BALL_VALUE = 255.0
EDGE = 1.0


@dataclass
class BallEpisode:
    frames: np.ndarray  # (T, H, W) uint8
    positions: np.ndarray  # (T, 2) float centers (x, y)
    velocity: np.ndarray  # (2,) px/frame, constant speed
    seed: int


def simulate(p0, v, t_steps, size, radius=BALL_RADIUS):
    """Elastic reflections in [radius, size-1-radius]^2; speed is conserved.

    Returns (positions, velocities), each (t_steps, 2); velocities[t] is the
    velocity while at positions[t].
    """
    lo, hi = radius, size - 1 - radius
    pos = np.asarray(p0, dtype=float).copy()
    vel = np.asarray(v, dtype=float).copy()
    out = np.zeros((t_steps, 2))
    vels = np.zeros((t_steps, 2))
    for t in range(t_steps):
        out[t] = pos
        vels[t] = vel
        pos = pos + vel
        for axis in range(2):
            if pos[axis] < lo:
                pos[axis] = 2 * lo - pos[axis]
                vel[axis] = -vel[axis]
            elif pos[axis] > hi:
                pos[axis] = 2 * hi - pos[axis]
                vel[axis] = -vel[axis]
    return out, vels


def simulate_positions(p0, v, t_steps, size, radius=BALL_RADIUS):
    return simulate(p0, v, t_steps, size, radius)[0]


def render_ball(center, size, radius=BALL_RADIUS) -> np.ndarray:
    ys, xs = np.mgrid[0:size, 0:size]
    dist = np.hypot(xs - center[0], ys - center[1])
    disc = np.clip((radius + EDGE - dist) / EDGE, 0.0, 1.0)
    return np.clip(np.rint(disc * BALL_VALUE), 0, 255).astype(np.uint8)


def gen_video_data(count: int, seed: int, t_steps: int = T_VIDEO, size: int = 32,
                   speed_range=(1.0, 2.0)):
    """Deterministic list of bouncing-ball episodes."""
    episodes = []
    for i in range(count):
        ep_seed = seed + i
        rng = substream(ep_seed, "ball")
        margin = BALL_RADIUS + 2.0
        p0 = rng.uniform(margin, size - 1 - margin, size=2)
        angle = rng.uniform(0, 2 * np.pi)
        speed = rng.uniform(*speed_range)
        v = speed * np.array([np.cos(angle), np.sin(angle)])
        positions = simulate_positions(p0, v, t_steps, size)
        frames = np.stack([render_ball(p, size) for p in positions])
        episodes.append(BallEpisode(frames=frames, positions=positions, velocity=v,
                                    seed=ep_seed))
    return episodes
