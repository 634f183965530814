"""The policy: latent transport from history to future action chunks.

One class covers the main algorithm and its ablation variants, selected by
``config.algo``:

  a2a              flow in latent space, source = encoded history
  fm-noise         flow in latent space, source = standard Gaussian draw
  reg-latent       one-shot latent regression (no flow time, no integration)
  flow-action-mlp  flow on flattened raw chunks with the MLP velocity net
  flow-action-unet flow on raw chunks with a 1-D UNet velocity net

Training losses follow the weighted sum of the velocity-matching term, the
autoencoder reconstruction term and the integration-consistency term; the
raw-action variants drop the autoencoder pieces.
"""

import numpy as np

from ..data import NormStats, denormalize, normalize
from ..errors import ConfigError, InputError
from ..nn import Module, Tensor, default_dtype
from ..seeding import substream
from .config import PolicyConfig
from .flow import (
    euler_integrate,
    inject_history_noise,
    loss_ae,
    loss_fm,
    loss_ic,
    loss_total,
    ot_interpolate,
)
from .nets import ActionDecoder, ActionEncoder, FlowNet, UNet1d, VisionEncoder

LATENT_ALGOS = ("a2a", "fm-noise", "reg-latent")


class Policy(Module):
    def __init__(self, cfg: PolicyConfig, rng, stats: NormStats = None):
        self.cfg = cfg
        self.stats = stats
        self.vision = VisionEncoder(cfg, rng)
        if cfg.algo in LATENT_ALGOS:
            self.encoder = ActionEncoder(cfg, rng)
            self.decoder = ActionDecoder(cfg, rng)
            self.flow = FlowNet(cfg, rng)
        elif cfg.algo == "flow-action-mlp":
            self.flow = FlowNet(cfg, rng, dim=cfg.raw_chunk_dim)
        else:  # flow-action-unet
            self.flow = UNet1d(cfg, rng)

    @classmethod
    def init(cls, cfg: PolicyConfig, seed: int, stats: NormStats = None) -> "Policy":
        return cls(cfg, substream(seed, "init"), stats)

    # -- building blocks ----------------------------------------------------

    def encode_actions(self, chunk) -> Tensor:
        """Normalized chunk(s) (n,d) or (B,n,d) -> latent(s)."""
        chunk = Tensor._lift(np.asarray(chunk, dtype=default_dtype()))
        if chunk.ndim == 2:
            chunk = chunk.reshape(1, *chunk.shape)
        return self.encoder(chunk)

    def decode_latent(self, z) -> Tensor:
        return self.decoder(Tensor._lift(z))

    def encode_obs(self, frames) -> Tensor:
        """uint8 frame stack (m,H,W) or (B,m,H,W) -> condition vector(s)."""
        arr = np.asarray(frames)
        if arr.ndim == 3:
            arr = arr[None]
        if arr.shape[1] != self.cfg.m:
            raise ConfigError(f"expected {self.cfg.m} frames, got {arr.shape[1]}")
        return self.vision(Tensor(arr.astype(default_dtype()) / 255.0))

    def source(self, history_normed: np.ndarray, rng=None) -> Tensor:
        """Flow source for the configured algorithm.

        history_normed: (B, n, d) in normalized action space.
        """
        algo = self.cfg.algo
        if algo in ("a2a", "reg-latent"):
            return self.encode_actions(history_normed)
        if algo == "fm-noise":
            if rng is None:
                raise InputError("fm-noise source requires an rng")
            b = history_normed.shape[0]
            return Tensor(rng.standard_normal((b, self.cfg.d_lat)).astype(default_dtype()))
        if algo.startswith("flow-action"):
            b = history_normed.shape[0]
            return Tensor(
                np.asarray(history_normed, dtype=default_dtype()).reshape(b, -1)
            )
        raise ConfigError(f"unknown algo {algo!r}")

    def predict_target(self, z0: Tensor, cond: Tensor, k_steps: int) -> Tensor:
        """Transport the source to the predicted future latent / chunk vector."""
        if self.cfg.algo == "reg-latent":
            return z0 + self.flow(z0, 0.0, cond)
        return euler_integrate(z0, lambda z, t: self.flow(z, t, cond), k_steps)

    def _to_actions(self, z: Tensor) -> Tensor:
        if self.cfg.algo in LATENT_ALGOS:
            return self.decoder(z)
        return z.reshape(-1, self.cfg.n, self.cfg.action_dim)

    # -- training ------------------------------------------------------------

    def loss_batch(self, history, obs, future, rng):
        """Total loss and per-component values for one normalized batch.

        history/future: (B, n, d) normalized; obs: (B, m, H, W) uint8.
        """
        cfg = self.cfg
        history = inject_history_noise(
            np.asarray(history, dtype=default_dtype()), cfg.sigma_h, rng
        )
        future_t = Tensor(np.asarray(future, dtype=default_dtype()))
        cond = self.encode_obs(obs)
        z0 = self.source(history, rng)
        b = history.shape[0]
        taus = rng.uniform(0.0, 1.0, size=b)

        if cfg.algo in LATENT_ALGOS:
            z1 = self.encode_actions(future)
            l_ae = loss_ae(self.decoder(z1), future_t)
            if cfg.algo == "reg-latent":
                z_hat = self.predict_target(z0, cond, cfg.k_train)
                l_ic = loss_ic(z_hat, z1, self.decoder(z_hat), future_t, cfg.lambda0)
                l_fm = Tensor._lift(0.0)
            else:
                za, zb = (z0.detach(), z1.detach()) if cfg.detach_flow_endpoints else (z0, z1)
                z_tau = ot_interpolate(za, zb, taus[:, None])
                l_fm = loss_fm(self.flow(z_tau, taus, cond), za, zb)
                z_hat = self.predict_target(z0, cond, cfg.k_train)
                l_ic = loss_ic(z_hat, z1, self.decoder(z_hat), future_t, cfg.lambda0)
            total = loss_total(l_fm, l_ae, l_ic, cfg.lambda1, cfg.lambda2, cfg.lambda3)
        else:
            x1 = Tensor(np.asarray(future, dtype=default_dtype()).reshape(b, -1))
            x_tau = ot_interpolate(z0, x1, taus[:, None])
            l_fm = loss_fm(self.flow(x_tau, taus, cond), z0, x1)
            x_hat = self.predict_target(z0, cond, cfg.k_train)
            l_ic = (x_hat - x1).abs().mean()
            l_ae = Tensor._lift(0.0)
            total = loss_total(l_fm, l_ae, l_ic, cfg.lambda1, cfg.lambda2, cfg.lambda3)

        parts = {
            "loss_fm": l_fm.item(),
            "loss_ae": l_ae.item(),
            "loss_ic": l_ic.item(),
            "loss_total": total.item(),
        }
        return total, parts

    # -- inference -------------------------------------------------------------

    def generate_chunk(self, history_raw, frames, k_steps: int, rng=None,
                       history_noise: bool = False) -> np.ndarray:
        """Predict the next n raw actions from raw history and a frame stack."""
        if self.stats is None:
            raise InputError("policy has no normalization stats; load a checkpoint first")
        history_raw = np.asarray(history_raw, dtype=np.float32)
        if history_raw.shape != (self.cfg.n, self.cfg.action_dim):
            raise InputError(
                f"history must be ({self.cfg.n},{self.cfg.action_dim}), got {history_raw.shape}"
            )
        if rng is None:
            rng = substream(0, "generate")
        hist = normalize(history_raw, self.stats)[None]
        if history_noise:
            hist = inject_history_noise(hist, self.cfg.sigma_h, rng)
        cond = self.encode_obs(frames)
        z0 = self.source(hist, rng)
        z1 = self.predict_target(z0, cond, k_steps)
        chunk = self._to_actions(z1).data[0]
        return denormalize(chunk, self.stats)
