"""Deterministic rasterizer for the planar arm.

Every image is a pure function of (arm state, render spec). Shapes are drawn
from distance fields with a one-pixel soft edge so positions are encoded with
sub-pixel resolution. Perturbation levels stack:

  level 0  nominal: black background, bright links, mid-bright target disc
  level 1  + procedural background texture from the seed
  level 2  + global brightness/contrast jitter from the seed
  level 3  + integer viewpoint translation up to +-3 px from the seed

Each level draws from an independent substream of the seed, so a level-3
image is exactly the translated level-2 image for the same seed.
"""

from dataclasses import dataclass

import numpy as np

from ..seeding import substream
from .arm import DEFAULT_LINKS, forward_kinematics

ARM_VALUE = 255.0
TARGET_VALUE = 170.0
TEXTURE_MAX = 90.0
LINK_HALF_WIDTH_PX = 0.8
TARGET_RADIUS_PX = 1.6
EDGE_PX = 1.0
VIEW_SCALE = 1.1  # half-extent of the view in units of total reach
MAX_VIEW_SHIFT = 3


@dataclass(frozen=True)
class RenderSpec:
    width: int = 32
    height: int = 32
    channels: int = 1
    level: int = 0
    seed: int = 0


def _pixel_grid(spec: RenderSpec, links):
    extent = VIEW_SCALE * (links[0] + links[1])
    xs = (np.arange(spec.width) + 0.5) / spec.width * 2 * extent - extent
    ys = extent - (np.arange(spec.height) + 0.5) / spec.height * 2 * extent
    px = 2 * extent / spec.width  # world units per pixel
    return np.meshgrid(xs, ys), px


def _segment_distance(gx, gy, a, b):
    ab = b - a
    denom = float(ab @ ab) or 1.0
    t = np.clip(((gx - a[0]) * ab[0] + (gy - a[1]) * ab[1]) / denom, 0.0, 1.0)
    cx, cy = a[0] + t * ab[0], a[1] + t * ab[1]
    return np.hypot(gx - cx, gy - cy)


def _soft(dist, radius, edge):
    return np.clip((radius + edge - dist) / edge, 0.0, 1.0)


def _texture(spec: RenderSpec):
    rng = substream(spec.seed, "texture")
    (gx, gy), _ = _pixel_grid(spec, DEFAULT_LINKS)
    field = np.zeros_like(gx)
    for _ in range(4):
        kx, ky = rng.uniform(0.5, 3.0, size=2)
        phx, phy = rng.uniform(0, 2 * np.pi, size=2)
        field += rng.uniform(0.3, 1.0) * np.cos(kx * gx + phx) * np.cos(ky * gy + phy)
    field -= field.min()
    peak = field.max()
    if peak > 0:
        field *= TEXTURE_MAX / peak
    return field


def render(state, spec: RenderSpec, links=DEFAULT_LINKS) -> np.ndarray:
    """Rasterize the arm state to a (height, width) uint8 image."""
    (gx, gy), px = _pixel_grid(spec, links)
    edge = EDGE_PX * px

    img = np.zeros((spec.height, spec.width))
    if spec.level >= 1:
        img = _texture(spec)

    base = np.zeros(2)
    elbow = links[0] * np.array([np.cos(state.joints[0]), np.sin(state.joints[0])])
    tip = forward_kinematics(state.joints, links)

    disc = _soft(np.hypot(gx - state.target[0], gy - state.target[1]),
                 TARGET_RADIUS_PX * px, edge)
    img = np.maximum(img, disc * TARGET_VALUE)
    for a, b in ((base, elbow), (elbow, tip)):
        seg = _soft(_segment_distance(gx, gy, a, b), LINK_HALF_WIDTH_PX * px, edge)
        img = np.maximum(img, seg * ARM_VALUE)

    if spec.level >= 2:
        rng = substream(spec.seed, "light")
        gain = rng.uniform(0.7, 1.3)
        bias = rng.uniform(-25.0, 25.0)
        img = gain * img + bias

    img = np.clip(np.rint(img), 0, 255).astype(np.uint8)

    if spec.level >= 3:
        dx, dy = view_shift(spec)
        shifted = np.zeros_like(img)
        h, w = img.shape
        ys_src = slice(max(0, -dy), min(h, h - dy))
        xs_src = slice(max(0, -dx), min(w, w - dx))
        ys_dst = slice(max(0, dy), min(h, h + dy))
        xs_dst = slice(max(0, dx), min(w, w + dx))
        shifted[ys_dst, xs_dst] = img[ys_src, xs_src]
        img = shifted
    return img


def view_shift(spec: RenderSpec):
    """The integer (dx, dy) viewpoint translation a level-3 spec applies."""
    rng = substream(spec.seed, "view")
    return tuple(int(v) for v in rng.integers(-MAX_VIEW_SHIFT, MAX_VIEW_SHIFT + 1, size=2))
