"""Frames-to-frames model: variational conv encoder, token transformer flow,
upsampling conv decoder.

The stacked history frames are encoded into a latent with mean/log-variance
heads; the latent is reshaped into tokens and transported to the future-frame
latent by a small transformer conditioned on the flow time; a five-layer
convolutional decoder upsamples the target latent back to the future frames.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, InputError
from ..nn import Conv2d, LayerNorm, Linear, Module, Tensor, default_dtype, silu
from ..nn.layers import layer_norm_noaffine, time_embed_batch


@dataclass
class F2FConfig:
    frames_in: int = 3
    frames_out: int = 3
    size: int = 32
    d_vlat: int = 64
    tokens: int = 4
    d_model: int = 64
    heads: int = 4
    layers: int = 4
    time_dim: int = 32
    enc_channels: tuple = (16, 32, 32)
    dec_channels: tuple = (32, 32, 16, 16)
    k_train: int = 1
    lambda0: float = 0.5
    lambda1: float = 1.0
    lambda2: float = 0.5
    lambda3: float = 1.0
    beta_kl: float = 1e-4
    algo: str = "flow"  # flow | regression

    def __post_init__(self):
        if self.algo not in ("flow", "regression"):
            raise ConfigError(f"unknown video algo {self.algo!r}")
        if self.d_vlat % self.tokens:
            raise ConfigError("d_vlat must be divisible by the token count")
        if self.d_model % self.heads:
            raise ConfigError("d_model must be divisible by the head count")
        self.enc_channels = tuple(self.enc_channels)
        self.dec_channels = tuple(self.dec_channels)


class MultiHeadAttention(Module):
    def __init__(self, dim, heads, rng):
        self.heads = heads
        self.head_dim = dim // heads
        self.wq = Linear(dim, dim, rng)
        self.wk = Linear(dim, dim, rng)
        self.wv = Linear(dim, dim, rng)
        self.wo = Linear(dim, dim, rng)

    def forward(self, x: Tensor) -> Tensor:
        b, t, d = x.shape
        h, hd = self.heads, self.head_dim

        def split(proj):
            return proj.reshape(b, t, h, hd).transpose(0, 2, 1, 3)

        q, k, v = split(self.wq(x)), split(self.wk(x)), split(self.wv(x))
        scores = (q @ k.transpose(0, 1, 3, 2)) * (1.0 / np.sqrt(hd))
        out = scores.softmax() @ v
        return self.wo(out.transpose(0, 2, 1, 3).reshape(b, t, d))


class ConditionedBlock(Module):
    """Pre-norm transformer block with zero-initialized condition modulation."""

    def __init__(self, dim, heads, rng):
        self.dim = dim
        self.mod = Linear(dim, 6 * dim, rng, zero_init=True)
        self.attn = MultiHeadAttention(dim, heads, rng)
        self.fc1 = Linear(dim, 2 * dim, rng)
        self.fc2 = Linear(2 * dim, dim, rng)

    def forward(self, x: Tensor, cond: Tensor) -> Tensor:
        d = self.dim
        mods = self.mod(cond).reshape(-1, 1, 6 * d)
        sc1, sh1, g1 = mods[:, :, :d], mods[:, :, d : 2 * d], mods[:, :, 2 * d : 3 * d]
        sc2, sh2, g2 = (mods[:, :, 3 * d : 4 * d], mods[:, :, 4 * d : 5 * d],
                        mods[:, :, 5 * d :])
        h = layer_norm_noaffine(x) * (sc1 + 1.0) + sh1
        x = x + g1 * self.attn(h)
        h = layer_norm_noaffine(x) * (sc2 + 1.0) + sh2
        x = x + g2 * self.fc2(silu(self.fc1(h)))
        return x


class TokenFlowNet(Module):
    """Velocity field over a latent vector, computed token-wise by a transformer."""

    def __init__(self, cfg: F2FConfig, rng):
        self.cfg = cfg
        tok_dim = cfg.d_vlat // cfg.tokens
        self.inp = Linear(tok_dim, cfg.d_model, rng)
        self.pos = Tensor(
            rng.normal(scale=0.02, size=(1, cfg.tokens, cfg.d_model)).astype(default_dtype()),
            requires_grad=True,
        )
        self.t_proj = Linear(cfg.time_dim, cfg.d_model, rng)
        self.blocks = [ConditionedBlock(cfg.d_model, cfg.heads, rng)
                       for _ in range(cfg.layers)]
        self.norm = LayerNorm(cfg.d_model)
        self.out = Linear(cfg.d_model, tok_dim, rng, zero_init=True)

    def forward(self, z: Tensor, tau) -> Tensor:
        cfg = self.cfg
        b = z.shape[0]
        taus = np.full(b, tau, dtype=np.float64) if np.isscalar(tau) else tau
        cond = self.t_proj(Tensor(time_embed_batch(taus, cfg.time_dim)))
        x = self.inp(z.reshape(b, cfg.tokens, cfg.d_vlat // cfg.tokens)) + self.pos
        for block in self.blocks:
            x = block(x, cond)
        return self.out(self.norm(x)).reshape(b, cfg.d_vlat)


class F2FModel(Module):
    def __init__(self, cfg: F2FConfig, rng):
        self.cfg = cfg
        chans = (cfg.frames_in,) + cfg.enc_channels
        self.enc_convs = [
            Conv2d(cin, cout, rng, kernel=3, stride=2, pad=1)
            for cin, cout in zip(chans[:-1], chans[1:])
        ]
        self.enc_spatial = cfg.size // (2 ** len(self.enc_convs))
        flat = cfg.enc_channels[-1] * self.enc_spatial**2
        self.mean_head = Linear(flat, cfg.d_vlat, rng)
        self.logvar_head = Linear(flat, cfg.d_vlat, rng, zero_init=True)
        self.flow = TokenFlowNet(cfg, rng)

        c0, c1, c2, c3 = cfg.dec_channels
        self.dec_spatial = cfg.size // 8  # three 2x upsamplings reach full size
        self.dec_in = Linear(cfg.d_vlat, c0 * self.dec_spatial**2, rng)
        self.dec_conv1 = Conv2d(c0, c1, rng, kernel=3, pad=1)
        self.dec_conv2 = Conv2d(c1, c2, rng, kernel=3, pad=1)
        self.dec_conv3 = Conv2d(c2, c3, rng, kernel=3, pad=1)
        self.dec_refine = Conv2d(c3, c3, rng, kernel=3, pad=1)
        self.dec_head = Conv2d(c3, cfg.frames_out, rng, kernel=3, pad=1)

    # -- encoder ----------------------------------------------------------

    def encode(self, frames: Tensor):
        """(B, frames_in, H, W) in [0,1] -> (mean, logvar), each (B, d_vlat)."""
        if frames.ndim != 4 or frames.shape[1] != self.cfg.frames_in:
            raise InputError(
                f"expected (B,{self.cfg.frames_in},{self.cfg.size},{self.cfg.size}), "
                f"got {frames.shape}"
            )
        h = frames
        for conv in self.enc_convs:
            h = silu(conv(h))
        flat = h.reshape(h.shape[0], -1)
        return self.mean_head(flat), self.logvar_head(flat)

    @staticmethod
    def sample_latent(mean: Tensor, logvar: Tensor, rng) -> Tensor:
        eps = Tensor(rng.standard_normal(mean.shape).astype(mean.data.dtype))
        return mean + (logvar * 0.5).exp() * eps

    # -- decoder ----------------------------------------------------------

    def decode(self, z: Tensor) -> Tensor:
        """Latent -> (B, frames_out, H, W) in [0,1] scale (unclamped)."""
        c0 = self.cfg.dec_channels[0]
        h = silu(self.dec_in(z)).reshape(-1, c0, self.dec_spatial, self.dec_spatial)
        h = silu(self.dec_conv1(h.repeat_axis(2, 2).repeat_axis(2, 3)))
        h = silu(self.dec_conv2(h.repeat_axis(2, 2).repeat_axis(2, 3)))
        h = silu(self.dec_conv3(h.repeat_axis(2, 2).repeat_axis(2, 3)))
        h = silu(self.dec_refine(h))
        return self.dec_head(h)

    def velocity(self, z: Tensor, tau) -> Tensor:
        return self.flow(z, tau)

    @staticmethod
    def kl_divergence(mean: Tensor, logvar: Tensor) -> Tensor:
        """Mean KL(q || N(0,1)) per latent element."""
        return (mean.square() + logvar.exp() - logvar - 1.0).mean() * 0.5
