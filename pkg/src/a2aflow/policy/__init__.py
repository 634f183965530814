from .config import ALGOS, PolicyConfig, TrainConfig
from .flow import (
    euler_integrate,
    inject_history_noise,
    loss_ae,
    loss_fm,
    loss_ic,
    loss_total,
    ot_interpolate,
    target_velocity,
)
from .model import Policy

__all__ = [
    "ALGOS",
    "PolicyConfig",
    "TrainConfig",
    "Policy",
    "ot_interpolate",
    "target_velocity",
    "euler_integrate",
    "loss_fm",
    "loss_ae",
    "loss_ic",
    "loss_total",
    "inject_history_noise",
]
