"""Convolution kernel backend selection.

Two interchangeable implementations exist: a compiled direct-loop extension
and a pure-numpy im2col+BLAS fallback. Measured on this artifact's shapes
(see benchmarks/bench_backends.py), the compiled kernels win at small batch
sizes (inference latency; no im2col materialization) while BLAS wins at
training batch sizes, so ``auto`` dispatches on the batch dimension.

``A2AFLOW_KERNELS`` overrides: ``compiled`` | ``numpy`` | ``auto`` (default).
When the extension is unavailable, ``auto`` silently uses numpy.
"""

import os

from . import _kernels_np

# Batch sizes below this run on the compiled kernels in auto mode.
AUTO_BATCH_CROSSOVER = 8

_choice = os.environ.get("A2AFLOW_KERNELS", "auto")
if _choice not in ("auto", "compiled", "numpy"):
    raise RuntimeError(f"A2AFLOW_KERNELS must be auto|compiled|numpy, got {_choice!r}")

_compiled = None
if _choice in ("auto", "compiled"):
    try:
        from . import _ckernels as _compiled
    except ImportError:
        if _choice == "compiled":
            raise

if _compiled is None:
    BACKEND = "numpy"
elif _choice == "compiled":
    BACKEND = "compiled"
else:
    BACKEND = "auto"


def _dispatch(name):
    np_fn = getattr(_kernels_np, name)
    if _compiled is None:
        return np_fn
    cy_fn = getattr(_compiled, name)
    if _choice == "compiled":
        return cy_fn

    def auto(x, *args):
        fn = cy_fn if x.shape[0] < AUTO_BATCH_CROSSOVER else np_fn
        return fn(x, *args)

    return auto


conv1d_forward = _dispatch("conv1d_forward")
conv1d_backward = _dispatch("conv1d_backward")
conv2d_forward = _dispatch("conv2d_forward")
conv2d_backward = _dispatch("conv2d_backward")


def backend_name() -> str:
    return BACKEND
