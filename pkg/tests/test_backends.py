"""Parity of the compiled and numpy convolution kernels."""

import numpy as np
import pytest

from a2aflow import _kernels_np as np_k

compiled = pytest.importorskip("a2aflow._ckernels")


CASES_1D = [
    (1, 3, 8, 4, 5, 1, 2),
    (4, 3, 9, 6, 5, 1, 2),
    (2, 5, 8, 7, 3, 2, 1),
    (3, 2, 7, 4, 3, 1, 1),
]

CASES_2D = [
    (1, 3, 8, 8, 4, 3, 1, 1),
    (2, 4, 9, 7, 5, 3, 2, 1),
    (3, 2, 8, 8, 6, 3, 2, 1),
    (2, 3, 6, 6, 4, 5, 1, 2),
]


@pytest.mark.parametrize("dtype", [np.float32, np.float64])
@pytest.mark.parametrize("case", CASES_1D)
def test_conv1d_parity(case, dtype):
    b, c, l, co, k, stride, pad = case
    rng = np.random.default_rng(hash(case) % 2**32)
    x = rng.normal(size=(b, c, l)).astype(dtype)
    w = rng.normal(size=(co, c, k)).astype(dtype)
    bias = rng.normal(size=co).astype(dtype)
    y_c = compiled.conv1d_forward(x, w, bias, stride, pad)
    y_n = np_k.conv1d_forward(x, w, bias, stride, pad)
    np.testing.assert_allclose(y_c, y_n, rtol=1e-5, atol=1e-5)
    gy = rng.normal(size=y_c.shape).astype(dtype)
    for a, b_ in zip(compiled.conv1d_backward(x, w, gy, stride, pad),
                     np_k.conv1d_backward(x, w, gy, stride, pad)):
        np.testing.assert_allclose(a, b_, rtol=1e-4, atol=1e-4)


@pytest.mark.parametrize("dtype", [np.float32, np.float64])
@pytest.mark.parametrize("case", CASES_2D)
def test_conv2d_parity(case, dtype):
    b, c, h, w_in, co, k, stride, pad = case
    rng = np.random.default_rng(hash(case) % 2**32)
    x = rng.normal(size=(b, c, h, w_in)).astype(dtype)
    w = rng.normal(size=(co, c, k, k)).astype(dtype)
    bias = rng.normal(size=co).astype(dtype)
    y_c = compiled.conv2d_forward(x, w, bias, stride, pad)
    y_n = np_k.conv2d_forward(x, w, bias, stride, pad)
    np.testing.assert_allclose(y_c, y_n, rtol=1e-5, atol=1e-5)
    gy = rng.normal(size=y_c.shape).astype(dtype)
    for a, b_ in zip(compiled.conv2d_backward(x, w, gy, stride, pad),
                     np_k.conv2d_backward(x, w, gy, stride, pad)):
        np.testing.assert_allclose(a, b_, rtol=1e-4, atol=1e-4)


def test_auto_dispatch_boundary():
    from a2aflow import backend

    if backend.BACKEND != "auto":
        pytest.skip("dispatching backend not active")
    rng = np.random.default_rng(0)
    for b in (1, backend.AUTO_BATCH_CROSSOVER, 32):
        x = rng.normal(size=(b, 3, 8)).astype(np.float32)
        w = rng.normal(size=(4, 3, 5)).astype(np.float32)
        bias = np.zeros(4, dtype=np.float32)
        got = backend.conv1d_forward(x, w, bias, 1, 2)
        ref = np_k.conv1d_forward(x, w, bias, 1, 2)
        np.testing.assert_allclose(got, ref, rtol=1e-5, atol=1e-5)
