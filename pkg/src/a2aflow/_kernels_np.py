"""Vectorized numpy convolution kernels (im2col + BLAS matmul).

Fallback backend used when the compiled extension is unavailable. Both
backends share the same call signatures and accept float32 or float64
contiguous arrays.
"""

import numpy as np


def _col1d(xp: np.ndarray, kw: int, stride: int, lout: int) -> np.ndarray:
    # (B, C, Lp) -> view (B, C, kw, lout)
    b, c, _ = xp.shape
    sb, sc, sl = xp.strides
    return np.lib.stride_tricks.as_strided(
        xp, shape=(b, c, kw, lout), strides=(sb, sc, sl, sl * stride), writeable=False
    )


def conv1d_forward(x, w, bias, stride, pad):
    """x: (B,C,L), w: (Co,C,K), bias: (Co,) -> (B,Co,Lout)."""
    b, c, l = x.shape
    co, _, kw = w.shape
    lout = (l + 2 * pad - kw) // stride + 1
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad))) if pad else x
    cols = _col1d(xp, kw, stride, lout)
    y = np.einsum("bckl,ock->bol", cols, w, optimize=True)
    y += bias[None, :, None]
    return np.ascontiguousarray(y)


def conv1d_backward(x, w, gy, stride, pad):
    b, c, l = x.shape
    co, _, kw = w.shape
    lout = gy.shape[2]
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad))) if pad else x
    cols = _col1d(xp, kw, stride, lout)
    gw = np.einsum("bol,bckl->ock", gy, cols, optimize=True)
    gb = gy.sum(axis=(0, 2))
    gxp = np.zeros_like(xp)
    gcols = np.einsum("bol,ock->bckl", gy, w, optimize=True)
    for k in range(kw):
        gxp[:, :, k : k + stride * lout : stride] += gcols[:, :, k, :]
    gx = gxp[:, :, pad : pad + l] if pad else gxp
    return np.ascontiguousarray(gx), gw, gb


def _col2d(xp: np.ndarray, kh: int, kw: int, stride: int, ho: int, wo: int) -> np.ndarray:
    b, c, _, _ = xp.shape
    sb, sc, sh, sw = xp.strides
    return np.lib.stride_tricks.as_strided(
        xp,
        shape=(b, c, kh, kw, ho, wo),
        strides=(sb, sc, sh, sw, sh * stride, sw * stride),
        writeable=False,
    )


def conv2d_forward(x, w, bias, stride, pad):
    """x: (B,C,H,W), w: (Co,C,kh,kw), bias: (Co,) -> (B,Co,Ho,Wo)."""
    b, c, h, wi = x.shape
    co, _, kh, kw = w.shape
    ho = (h + 2 * pad - kh) // stride + 1
    wo = (wi + 2 * pad - kw) // stride + 1
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad))) if pad else x
    cols = _col2d(xp, kh, kw, stride, ho, wo)
    y = np.einsum("bcijhw,ocij->bohw", cols, w, optimize=True)
    y += bias[None, :, None, None]
    return np.ascontiguousarray(y)


def conv2d_backward(x, w, gy, stride, pad):
    b, c, h, wi = x.shape
    co, _, kh, kw = w.shape
    ho, wo = gy.shape[2], gy.shape[3]
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad))) if pad else x
    cols = _col2d(xp, kh, kw, stride, ho, wo)
    gw = np.einsum("bohw,bcijhw->ocij", gy, cols, optimize=True)
    gb = gy.sum(axis=(0, 2, 3))
    gxp = np.zeros_like(xp)
    gcols = np.einsum("bohw,ocij->bcijhw", gy, w, optimize=True)
    for i in range(kh):
        for j in range(kw):
            gxp[:, :, i : i + stride * ho : stride, j : j + stride * wo : stride] += gcols[
                :, :, i, j, :, :
            ]
    gx = gxp[:, :, pad : pad + h, pad : pad + wi] if pad else gxp
    return np.ascontiguousarray(gx), gw, gb
