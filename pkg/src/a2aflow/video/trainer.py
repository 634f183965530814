"""Training loop, prediction and evaluation for the frames-to-frames model."""

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from ..data import NormStats
from ..errors import ConfigError, InputError, TrainingError
from ..nn import Adam, Tensor, default_dtype
from ..policy.flow import euler_integrate, loss_total, ot_interpolate
from ..seeding import substream
from .model import F2FConfig, F2FModel


@dataclass
class F2FTrainConfig:
    model: F2FConfig = field(default_factory=F2FConfig)
    epochs: int = 40
    batch_size: int = 32
    lr: float = 3e-4
    seed: int = 0


def f2f_config_from_dict(data: dict) -> F2FTrainConfig:
    if not isinstance(data, dict):
        raise ConfigError("video train config must be a JSON object")
    names = {f.name for f in dataclasses.fields(F2FTrainConfig)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown F2FTrainConfig keys: {sorted(unknown)}")
    kwargs = dict(data)
    if "model" in kwargs:
        mnames = {f.name for f in dataclasses.fields(F2FConfig)}
        munknown = set(kwargs["model"]) - mnames
        if munknown:
            raise ConfigError(f"unknown F2FConfig keys: {sorted(munknown)}")
        kwargs["model"] = F2FConfig(**kwargs["model"])
    return F2FTrainConfig(**kwargs)


def save_f2f_checkpoint(path, cfg: F2FTrainConfig, epoch: int, model: F2FModel):
    from ..train.checkpoint import save_checkpoint

    empty = NormStats(lo=np.zeros(0), hi=np.zeros(0))
    save_checkpoint(path, cfg, epoch, empty, model.param_arrays(), kind="f2f")


def load_f2f_checkpoint(path):
    """Returns (model, config, epoch)."""
    from ..train.checkpoint import load_checkpoint

    ckpt = load_checkpoint(path, kind="f2f", parse_config=f2f_config_from_dict,
                           stats_dims=lambda cfg: 0)
    model = F2FModel(ckpt.config.model, substream(0, "f2f-rebuild"))
    model.load_param_arrays(ckpt.params)
    return model, ckpt.config, ckpt.epoch


@dataclass
class F2FOutput:
    model: F2FModel
    config: F2FTrainConfig
    losses: list = field(default_factory=list)  # per-epoch mean component dicts


def _window_index(episodes, f_in, f_out):
    index = []
    for ei, ep in enumerate(episodes):
        t_len = ep.frames.shape[0]
        for t in range(f_in - 1, t_len - f_out):
            index.append((ei, t))
    return index


def _batch(episodes, sel, f_in, f_out):
    hist = np.stack([episodes[ei].frames[t - f_in + 1 : t + 1] for ei, t in sel])
    fut = np.stack([episodes[ei].frames[t + 1 : t + 1 + f_out] for ei, t in sel])
    scale = np.float32(1.0 / 255.0)
    return hist.astype(default_dtype()) * scale, fut.astype(default_dtype()) * scale


def f2f_loss_batch(model: F2FModel, hist, fut, rng):
    cfg = model.cfg
    hist_t, fut_t = Tensor(hist), Tensor(fut)
    m0, lv0 = model.encode(hist_t)
    m1, lv1 = model.encode(fut_t)
    z0 = model.sample_latent(m0, lv0, rng)
    z1 = model.sample_latent(m1, lv1, rng)

    l_ae = (model.decode(z1) - fut_t).abs().mean()
    kl = (model.kl_divergence(m0, lv0) + model.kl_divergence(m1, lv1)) * 0.5

    if cfg.algo == "flow":
        taus = rng.uniform(0.0, 1.0, size=hist.shape[0])
        z_tau = ot_interpolate(z0.detach(), z1.detach(), taus[:, None])
        diff = model.velocity(z_tau, taus) - (z1.detach() - z0.detach())
        l_fm = diff.square().mean()
        z_hat = euler_integrate(z0, model.velocity, cfg.k_train)
    else:
        l_fm = Tensor._lift(0.0)
        z_hat = z0 + model.velocity(z0, 0.0)

    l_ic = (z_hat - z1).abs().mean() + cfg.lambda0 * (model.decode(z_hat) - fut_t).abs().mean()
    total = loss_total(l_fm, l_ae, l_ic, cfg.lambda1, cfg.lambda2, cfg.lambda3)
    total = total + kl * cfg.beta_kl
    parts = {"loss_fm": l_fm.item(), "loss_ae": l_ae.item(), "loss_ic": l_ic.item(),
             "kl": kl.item(), "loss_total": total.item()}
    return total, parts


def f2f_train(cfg: F2FTrainConfig, episodes) -> F2FOutput:
    model = F2FModel(cfg.model, substream(cfg.seed, "f2f-init"))
    opt = Adam(model.named_parameters(), lr=cfg.lr)
    index = _window_index(episodes, cfg.model.frames_in, cfg.model.frames_out)
    if not index:
        raise TrainingError("no training windows in the video dataset")
    out = F2FOutput(model=model, config=cfg)
    for epoch in range(1, cfg.epochs + 1):
        order = substream(cfg.seed, "f2f-shuffle", epoch).permutation(len(index))
        rng = substream(cfg.seed, "f2f-batch", epoch)
        sums, batches = {}, 0
        for lo in range(0, len(order), cfg.batch_size):
            sel = [index[i] for i in order[lo : lo + cfg.batch_size]]
            hist, fut = _batch(episodes, sel, cfg.model.frames_in, cfg.model.frames_out)
            total, parts = f2f_loss_batch(model, hist, fut, rng)
            if not np.isfinite(parts["loss_total"]):
                raise TrainingError(f"non-finite video loss at epoch {epoch}: {parts}")
            opt.zero_grad()
            total.backward()
            opt.step()
            for k, v in parts.items():
                sums[k] = sums.get(k, 0.0) + v
            batches += 1
        out.losses.append({k: v / batches for k, v in sums.items()} | {"epoch": epoch})
    return out


def f2f_predict(model: F2FModel, history, k_steps: int, rng=None) -> np.ndarray:
    """Predict the next frames_out frames from frames_in uint8 history frames.

    Deterministic in mean-latent mode (rng=None); outputs uint8 in [0, 255].
    """
    cfg = model.cfg
    history = np.asarray(history)
    if history.shape != (cfg.frames_in, cfg.size, cfg.size):
        raise InputError(
            f"history must be ({cfg.frames_in},{cfg.size},{cfg.size}), got {history.shape}"
        )
    hist = Tensor(history.astype(default_dtype())[None] / 255.0)
    mean, logvar = model.encode(hist)
    z0 = model.sample_latent(mean, logvar, rng) if rng is not None else mean
    if cfg.algo == "flow":
        z1 = euler_integrate(z0, model.velocity, k_steps)
    else:
        z1 = z0 + model.velocity(z0, 0.0)
    frames = model.decode(z1).data[0] * 255.0
    return np.clip(np.rint(frames), 0, 255).astype(np.uint8)


def f2f_eval(model: F2FModel, episodes, k_steps: int = 1):
    """Mean (psnr, ssim, mse) of the model and the copy-last-frame baseline.

    One prediction per episode, anchored at the last history-complete frame
    before the final frames_out frames.
    """
    from .metrics import frame_metrics

    cfg = model.cfg
    model_scores, copy_scores = [], []
    for ep in episodes:
        t = ep.frames.shape[0] - cfg.frames_out - 1
        hist = ep.frames[t - cfg.frames_in + 1 : t + 1]
        truth = ep.frames[t + 1 : t + 1 + cfg.frames_out]
        pred = f2f_predict(model, hist, k_steps)
        copy = np.repeat(hist[-1][None], cfg.frames_out, axis=0)
        model_scores.append([frame_metrics(p, g) for p, g in zip(pred, truth)])
        copy_scores.append([frame_metrics(p, g) for p, g in zip(copy, truth)])

    def agg(scores):
        arr = np.asarray(scores, dtype=float)  # (eps, frames, 3)
        m = arr.mean(axis=(0, 1))
        return {"psnr": float(m[0]), "ssim": float(m[1]), "mse": float(m[2])}

    return agg(model_scores), agg(copy_scores)
