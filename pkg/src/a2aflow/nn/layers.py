"""Parameterized layers and stateless ops built on the autodiff Tensor.

Conventions fixed project-wide: fan-in-scaled uniform weight init, zero
biases, SiLU nonlinearity inside MLPs, layer-norm epsilon 1e-5, and
zero-initialized modulation heads so conditioned residual blocks start as
exact identity maps.
"""

import numpy as np

from ..backend import conv1d_backward, conv1d_forward, conv2d_backward, conv2d_forward
from ..errors import ConfigError, InputError
from .tensor import Tensor, default_dtype

LN_EPS = 1e-5


class Module:
    """Base class; parameters are discovered by attribute scan in insertion order."""

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    def named_parameters(self, prefix=""):
        for name, value in vars(self).items():
            full = f"{prefix}{name}"
            if isinstance(value, Tensor) and value.requires_grad:
                yield full, value
            elif isinstance(value, Module):
                yield from value.named_parameters(prefix=full + ".")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(prefix=f"{full}.{i}.")

    def parameters(self):
        return [p for _, p in self.named_parameters()]

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def param_arrays(self):
        """Name -> raw numpy array, for serialization."""
        return {name: p.data for name, p in self.named_parameters()}

    def load_param_arrays(self, arrays):
        params = dict(self.named_parameters())
        missing = set(params) - set(arrays)
        extra = set(arrays) - set(params)
        if missing or extra:
            raise ConfigError(
                f"parameter set mismatch: missing={sorted(missing)} unexpected={sorted(extra)}"
            )
        for name, p in params.items():
            src = np.asarray(arrays[name])
            if src.shape != p.data.shape:
                raise ConfigError(f"{name}: shape {src.shape} != expected {p.data.shape}")
            p.data = src.astype(p.data.dtype)


def _uniform_fan_in(rng, shape, fan_in):
    bound = 1.0 / np.sqrt(fan_in)
    return Tensor(
        rng.uniform(-bound, bound, size=shape).astype(default_dtype()), requires_grad=True
    )


def _zeros(shape):
    return Tensor(np.zeros(shape, dtype=default_dtype()), requires_grad=True)


class Linear(Module):
    def __init__(self, in_dim, out_dim, rng, zero_init=False):
        self.w = _zeros((in_dim, out_dim)) if zero_init else _uniform_fan_in(
            rng, (in_dim, out_dim), in_dim
        )
        self.b = _zeros(out_dim)

    def forward(self, x: Tensor) -> Tensor:
        if x.shape[-1] != self.w.shape[0]:
            raise ConfigError(
                f"linear expects last dim {self.w.shape[0]}, got input shape {x.shape}"
            )
        return x @ self.w + self.b


def _conv_op(x, w, b, stride, pad, fwd, bwd):
    y = fwd(
        np.ascontiguousarray(x.data), np.ascontiguousarray(w.data), b.data, stride, pad
    )
    out = Tensor(y, _parents=(x, w, b))

    def backward(g):
        gx, gw, gb = bwd(
            np.ascontiguousarray(x.data),
            np.ascontiguousarray(w.data),
            np.ascontiguousarray(g, dtype=x.data.dtype),
            stride,
            pad,
        )
        if x.requires_grad:
            x._accumulate(gx)
        if w.requires_grad:
            w._accumulate(gw)
        if b.requires_grad:
            b._accumulate(gb)

    out._backward = backward
    return out


class Conv1d(Module):
    """Cross-correlation over the last axis of (B, C, L) inputs."""

    def __init__(self, in_ch, out_ch, rng, kernel=5, stride=1, pad=2):
        self.w = _uniform_fan_in(rng, (out_ch, in_ch, kernel), in_ch * kernel)
        self.b = _zeros(out_ch)
        self.stride, self.pad = stride, pad

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 3 or x.shape[1] != self.w.shape[1]:
            raise ConfigError(
                f"conv1d expects (B,{self.w.shape[1]},L), got {x.shape}"
            )
        if x.shape[2] < 1:
            raise ConfigError(f"conv1d input length must be >= 1, got {x.shape[2]}")
        return _conv_op(x, self.w, self.b, self.stride, self.pad, conv1d_forward, conv1d_backward)


class Conv2d(Module):
    def __init__(self, in_ch, out_ch, rng, kernel=3, stride=1, pad=1):
        self.w = _uniform_fan_in(rng, (out_ch, in_ch, kernel, kernel), in_ch * kernel * kernel)
        self.b = _zeros(out_ch)
        self.stride, self.pad = stride, pad

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 4 or x.shape[1] != self.w.shape[1]:
            raise ConfigError(
                f"conv2d expects (B,{self.w.shape[1]},H,W), got {x.shape}"
            )
        return _conv_op(x, self.w, self.b, self.stride, self.pad, conv2d_forward, conv2d_backward)


def layer_norm_noaffine(x: Tensor, eps: float = LN_EPS) -> Tensor:
    """Normalize the last axis to zero mean / unit variance (no learned affine)."""
    mu = x.data.mean(axis=-1, keepdims=True)
    var = x.data.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    y = (x.data - mu) * inv
    out = Tensor(y, _parents=(x,))

    def bw(g):
        gm = g.mean(axis=-1, keepdims=True)
        gy = (g * y).mean(axis=-1, keepdims=True)
        x._accumulate(inv * (g - gm - y * gy))

    out._backward = bw
    return out


class LayerNorm(Module):
    """Layer norm with learned scale and shift over the last axis."""

    def __init__(self, dim):
        self.scale = Tensor(np.ones(dim, dtype=default_dtype()), requires_grad=True)
        self.shift = _zeros(dim)

    def forward(self, x: Tensor) -> Tensor:
        return layer_norm_noaffine(x) * self.scale + self.shift


def silu(x: Tensor) -> Tensor:
    s = 1.0 / (1.0 + np.exp(-x.data))
    out = Tensor(x.data * s, _parents=(x,))

    def bw(g):
        x._accumulate(g * (s * (1.0 + x.data * (1.0 - s))))

    out._backward = bw
    return out


class ResidualMLPBlock(Module):
    """x + W2 silu(W1 x); building block of the action decoder."""

    def __init__(self, dim, rng, hidden=None):
        hidden = hidden or dim
        self.fc1 = Linear(dim, hidden, rng)
        self.fc2 = Linear(hidden, dim, rng)

    def forward(self, x: Tensor) -> Tensor:
        return x + self.fc2(silu(self.fc1(x)))


class AdaLNBlock(Module):
    """Residual MLP block gated and modulated by a conditioning vector.

    out = h + gate * MLP(shift + (1 + scale) * LN_noaffine(h)), where
    (scale, shift, gate) come from a zero-initialized head on the condition,
    so a fresh block is an exact identity on h.
    """

    def __init__(self, dim, rng, cond_dim=None, hidden=None):
        cond_dim = cond_dim or dim
        hidden = hidden or 2 * dim
        self.dim = dim
        self.mod = Linear(cond_dim, 3 * dim, rng, zero_init=True)
        self.fc1 = Linear(dim, hidden, rng)
        self.fc2 = Linear(hidden, dim, rng)

    def forward(self, h: Tensor, cond: Tensor) -> Tensor:
        if h.shape[-1] != self.dim or cond.shape[-1] != self.mod.w.shape[0]:
            raise ConfigError(
                f"adaln dims mismatch: h {h.shape}, cond {cond.shape}, block dim {self.dim}"
            )
        mods = self.mod(cond)
        scale = mods[..., : self.dim]
        shift = mods[..., self.dim : 2 * self.dim]
        gate = mods[..., 2 * self.dim :]
        x = layer_norm_noaffine(h) * (scale + 1.0) + shift
        return h + gate * self.fc2(silu(self.fc1(x)))


# Frequencies are geometric between these bounds; J = dim/2 pairs.
TIME_OMEGA_MIN = 1.0
TIME_OMEGA_MAX = 1000.0


def time_frequencies(dim: int) -> np.ndarray:
    if dim <= 0 or dim % 2 != 0:
        raise ConfigError(f"time embedding dim must be a positive even int, got {dim}")
    half = dim // 2
    if half == 1:
        return np.array([TIME_OMEGA_MIN])
    exps = np.arange(half) / (half - 1)
    return TIME_OMEGA_MIN * (TIME_OMEGA_MAX / TIME_OMEGA_MIN) ** exps


def time_embed(tau: float, dim: int) -> np.ndarray:
    """Sinusoidal embedding of a flow time in [0, 1]: pairs (sin, cos) per frequency."""
    if not 0.0 <= tau <= 1.0:
        raise InputError(f"flow time must be in [0, 1], got {tau}")
    return time_embed_batch(np.array([tau]), dim)[0]


def time_embed_batch(taus: np.ndarray, dim: int) -> np.ndarray:
    taus = np.asarray(taus, dtype=np.float64)
    if np.any((taus < 0.0) | (taus > 1.0)):
        raise InputError("flow times must be in [0, 1]")
    omegas = time_frequencies(dim)
    phase = taus[:, None] * omegas[None, :]
    out = np.empty((taus.shape[0], dim))
    out[:, 0::2] = np.sin(phase)
    out[:, 1::2] = np.cos(phase)
    return out.astype(default_dtype())
