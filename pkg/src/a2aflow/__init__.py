"""Latent action-to-action flow matching policies on a planar-arm benchmark."""

import os

# Must run before numpy is first imported anywhere in this process for the
# thread pinning to take effect in the BLAS backend.
if os.environ.get("A2A_DETERMINISTIC") == "1":
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
        "VECLIB_MAXIMUM_THREADS",
    ):
        os.environ.setdefault(_var, "1")

__version__ = "0.1.0"
