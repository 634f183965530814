"""Networks: action autoencoder, vision conditioner, velocity nets.

The velocity field is a stack of condition-modulated residual MLP blocks; the
modulation input is the sum of a projected flow-time embedding and the
projected visual condition. The raw-action baselines swap the MLP stack for
the same net on flattened chunks or for a small 1-D UNet over the sequence.
"""

import numpy as np

from ..errors import ConfigError
from ..nn import (
    AdaLNBlock,
    Conv1d,
    Conv2d,
    Linear,
    Module,
    ResidualMLPBlock,
    Tensor,
    concat,
    silu,
)
from ..nn.layers import time_embed_batch


class ActionEncoder(Module):
    """Chunk (B, n, d) -> latent (B, d_lat) via a kernel-5 temporal CNN."""

    def __init__(self, cfg, rng):
        h = cfg.enc_hidden
        self.n, self.d = cfg.n, cfg.action_dim
        self.conv1 = Conv1d(cfg.action_dim, h, rng, kernel=5, pad=2)
        self.conv2 = Conv1d(h, h, rng, kernel=5, pad=2)
        self.proj = Linear(h * cfg.n, cfg.d_lat, rng)

    def forward(self, chunk: Tensor) -> Tensor:
        if chunk.ndim != 3 or chunk.shape[1:] != (self.n, self.d):
            raise ConfigError(
                f"action chunk must be (B,{self.n},{self.d}), got {chunk.shape}"
            )
        x = chunk.transpose(0, 2, 1)
        x = silu(self.conv1(x))
        x = silu(self.conv2(x))
        return self.proj(x.reshape(x.shape[0], -1))


class ActionDecoder(Module):
    """Latent (B, d_lat) -> chunk (B, n, d) via a residual MLP."""

    def __init__(self, cfg, rng):
        w = cfg.decoder_width
        self.n, self.d = cfg.n, cfg.action_dim
        self.inp = Linear(cfg.d_lat, w, rng)
        self.blocks = [ResidualMLPBlock(w, rng) for _ in range(cfg.decoder_depth)]
        self.head = Linear(w, cfg.n * cfg.action_dim, rng)

    def forward(self, z: Tensor) -> Tensor:
        h = silu(self.inp(z))
        for block in self.blocks:
            h = block(h)
        return self.head(h).reshape(-1, self.n, self.d)


class VisionEncoder(Module):
    """Frame stack (B, m, H, W) in [0, 1] -> condition vector (B, d_cond)."""

    def __init__(self, cfg, rng):
        self.m = cfg.m
        chans = (cfg.m,) + cfg.vis_channels
        self.convs = [
            Conv2d(cin, cout, rng, kernel=3, stride=2, pad=1)
            for cin, cout in zip(chans[:-1], chans[1:])
        ]
        spatial = cfg.image_height * cfg.image_width // (4 ** len(self.convs))
        self.proj = Linear(cfg.vis_channels[-1] * spatial, cfg.d_cond, rng)

    def forward(self, frames: Tensor) -> Tensor:
        if frames.ndim != 4 or frames.shape[1] != self.m:
            raise ConfigError(f"frame stack must be (B,{self.m},H,W), got {frames.shape}")
        h = frames
        for conv in self.convs:
            h = silu(conv(h))
        return self.proj(h.reshape(h.shape[0], -1))


class FlowNet(Module):
    """Velocity field on vectors: condition-modulated residual MLP stack.

    Input and output dimension are both ``dim``; the conditioning vector is
    proj(time embedding) + proj(visual condition).
    """

    def __init__(self, cfg, rng, dim=None):
        dim = dim or cfg.d_lat
        w = cfg.flow_width
        self.time_dim = cfg.time_dim
        self.t_proj = Linear(cfg.time_dim, w, rng)
        self.c_proj = Linear(cfg.d_cond, w, rng)
        self.inp = Linear(dim, w, rng)
        self.blocks = [AdaLNBlock(w, rng, cond_dim=w) for _ in range(cfg.flow_depth)]
        self.head = Linear(w, dim, rng, zero_init=True)

    def forward(self, z: Tensor, tau, cond: Tensor) -> Tensor:
        taus = np.full(z.shape[0], tau, dtype=np.float64) if np.isscalar(tau) else tau
        emb = Tensor(time_embed_batch(taus, self.time_dim))
        mod = self.t_proj(emb) + self.c_proj(cond)
        h = self.inp(z)
        for block in self.blocks:
            h = block(h, mod)
        return self.head(h)


class UNet1d(Module):
    """Small 1-D UNet over (B, d, n) sequences with two downsampling stages."""

    def __init__(self, cfg, rng):
        w0, w1 = cfg.unet_widths
        d = cfg.action_dim
        self.n, self.d = cfg.n, d
        self.time_dim = cfg.time_dim
        self.t_proj0 = Linear(cfg.time_dim, w0, rng)
        self.c_proj0 = Linear(cfg.d_cond, w0, rng)
        self.t_proj1 = Linear(cfg.time_dim, w1, rng)
        self.c_proj1 = Linear(cfg.d_cond, w1, rng)
        self.conv_in = Conv1d(d, w0, rng, kernel=3, pad=1)
        self.down1 = Conv1d(w0, w1, rng, kernel=3, stride=2, pad=1)
        self.down2 = Conv1d(w1, w1, rng, kernel=3, stride=2, pad=1)
        self.up1 = Conv1d(2 * w1, w0, rng, kernel=3, pad=1)
        self.up0 = Conv1d(2 * w0, w0, rng, kernel=3, pad=1)
        self.head = Conv1d(w0, d, rng, kernel=3, pad=1)
        self.head.w.data[:] = 0.0

    def forward(self, z: Tensor, tau, cond: Tensor) -> Tensor:
        # z arrives flattened (B, n*d) to share the velocity-field interface
        x = z.reshape(-1, self.n, self.d).transpose(0, 2, 1)
        taus = np.full(x.shape[0], tau, dtype=np.float64) if np.isscalar(tau) else tau
        emb = Tensor(time_embed_batch(taus, self.time_dim))
        m0 = (self.t_proj0(emb) + self.c_proj0(cond)).reshape(x.shape[0], -1, 1)
        m1 = (self.t_proj1(emb) + self.c_proj1(cond)).reshape(x.shape[0], -1, 1)
        h0 = silu(self.conv_in(x) + m0)
        h1 = silu(self.down1(h0))
        h2 = silu(self.down2(h1) + m1)
        u1 = silu(self.up1(concat([h2.repeat_axis(2, axis=2), h1], axis=1)))
        u0 = silu(self.up0(concat([u1.repeat_axis(2, axis=2), h0], axis=1)))
        out = self.head(u0)
        return out.transpose(0, 2, 1).reshape(-1, self.n * self.d)
