"""Policy and training configuration.

Configs serialize to/from plain dicts (JSON documents); unknown keys are
rejected so sweep-script typos fail loudly.
"""

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field

from ..errors import ConfigError

ALGOS = ("a2a", "fm-noise", "reg-latent", "flow-action-mlp", "flow-action-unet")


@dataclass
class PolicyConfig:
    n: int = 8  # action horizon (history and future chunk length)
    m: int = 8  # observation horizon (stacked frames)
    action_dim: int = 3
    d_lat: int = 64
    d_cond: int = 64
    time_dim: int = 64
    enc_hidden: int = 32
    flow_width: int = 128
    flow_depth: int = 3
    decoder_width: int = 128
    decoder_depth: int = 2
    vis_channels: tuple = (16, 32, 32)
    unet_widths: tuple = (32, 64)
    k_train: int = 1  # Euler steps unrolled inside the consistency loss
    lambda0: float = 0.5
    lambda1: float = 1.0
    lambda2: float = 0.5
    lambda3: float = 1.0
    sigma_h: float = 0.0  # history-noise std in normalized action units
    algo: str = "a2a"
    image_height: int = 32
    image_width: int = 32
    detach_flow_endpoints: bool = True

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise ConfigError(f"unknown algo {self.algo!r}; choose from {ALGOS}")
        for name in ("lambda0", "lambda1", "lambda2", "lambda3"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.sigma_h < 0:
            raise ConfigError("sigma_h must be non-negative")
        if self.k_train < 1:
            raise ConfigError("k_train must be >= 1")
        self.vis_channels = tuple(self.vis_channels)
        self.unet_widths = tuple(self.unet_widths)

    @property
    def raw_chunk_dim(self) -> int:
        return self.n * self.action_dim

    @property
    def latent_dim(self) -> int:
        """Dimension the flow runs in: latent for latent algos, raw otherwise."""
        return self.raw_chunk_dim if self.algo.startswith("flow-action") else self.d_lat


@dataclass
class TrainConfig:
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    epochs: int = 30
    batch_size: int = 32
    lr: float = 1e-4
    seed: int = 0
    data_path: str = ""
    eval_cadence: int = 0  # evaluate every this many epochs (0 = off)
    eval_episodes: int = 20
    eval_k: int = 6
    chunk_stride: int = 1
    replan_stride: int = 0  # 0 = execute the full chunk before replanning


def _from_dict(cls, data: dict):
    if not isinstance(data, dict):
        raise ConfigError(f"expected a JSON object for {cls.__name__}, got {type(data).__name__}")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    kwargs = dict(data)
    if cls is TrainConfig and "policy" in kwargs:
        kwargs["policy"] = _from_dict(PolicyConfig, kwargs["policy"])
    return cls(**kwargs)


def policy_config_from_dict(data: dict) -> PolicyConfig:
    return _from_dict(PolicyConfig, data)


def train_config_from_dict(data: dict) -> TrainConfig:
    return _from_dict(TrainConfig, data)


def config_to_dict(cfg) -> dict:
    return dataclasses.asdict(cfg)


def config_hash(cfg) -> str:
    """Stable short hash of a config (dataclass or plain dict)."""
    data = config_to_dict(cfg) if dataclasses.is_dataclass(cfg) else cfg
    blob = json.dumps(data, sort_keys=True, default=list).encode()
    return hashlib.sha256(blob).hexdigest()[:12]
