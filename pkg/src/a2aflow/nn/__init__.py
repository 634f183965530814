from .tensor import Tensor, concat, default_dtype, precision, stack_rows
from .layers import (
    AdaLNBlock,
    Conv1d,
    Conv2d,
    LayerNorm,
    Linear,
    Module,
    ResidualMLPBlock,
    layer_norm_noaffine,
    silu,
    time_embed,
)
from .optim import Adam
from .gradcheck import grad_check

__all__ = [
    "Tensor",
    "concat",
    "stack_rows",
    "default_dtype",
    "precision",
    "Module",
    "Linear",
    "Conv1d",
    "Conv2d",
    "LayerNorm",
    "AdaLNBlock",
    "ResidualMLPBlock",
    "layer_norm_noaffine",
    "silu",
    "time_embed",
    "Adam",
    "grad_check",
]
