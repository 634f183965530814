# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled convolution kernels (hot path of training and inference).

Direct convolutions with hoisted weights and precomputed valid output ranges
so the inner loops stay branch-free. Signatures mirror _kernels_np; float32
and float64 are both supported so the 64-bit gradient-verification mode runs
through the same code.
"""

import numpy as np

ctypedef fused real:
    float
    double


cdef inline Py_ssize_t _lo(Py_ssize_t k, Py_ssize_t pad, Py_ssize_t stride) noexcept:
    # smallest o with o*stride + k - pad >= 0
    if k >= pad:
        return 0
    return (pad - k + stride - 1) // stride


cdef inline Py_ssize_t _hi(Py_ssize_t k, Py_ssize_t pad, Py_ssize_t stride,
                           Py_ssize_t n_in, Py_ssize_t n_out) noexcept:
    # largest o with o*stride + k - pad <= n_in - 1, clamped to n_out - 1
    cdef Py_ssize_t h = (n_in - 1 - k + pad) // stride
    return h if h < n_out - 1 else n_out - 1


def conv1d_forward(real[:, :, ::1] x, real[:, :, ::1] w, real[::1] bias, int stride, int pad):
    cdef Py_ssize_t B = x.shape[0], C = x.shape[1], L = x.shape[2]
    cdef Py_ssize_t Co = w.shape[0], K = w.shape[2]
    cdef Py_ssize_t Lout = (L + 2 * pad - K) // stride + 1
    out_np = np.empty((B, Co, Lout), dtype=np.asarray(x).dtype)
    cdef real[:, :, ::1] out = out_np
    cdef Py_ssize_t b, co, o, c, k, base, olo, ohi
    cdef real wv
    for b in range(B):
        for co in range(Co):
            for o in range(Lout):
                out[b, co, o] = bias[co]
        for c in range(C):
            for co in range(Co):
                for k in range(K):
                    wv = w[co, c, k]
                    base = k - pad
                    olo = _lo(k, pad, stride)
                    ohi = _hi(k, pad, stride, L, Lout)
                    for o in range(olo, ohi + 1):
                        out[b, co, o] += wv * x[b, c, o * stride + base]
    return out_np


def conv1d_backward(real[:, :, ::1] x, real[:, :, ::1] w, real[:, :, ::1] gy, int stride, int pad):
    cdef Py_ssize_t B = x.shape[0], C = x.shape[1], L = x.shape[2]
    cdef Py_ssize_t Co = w.shape[0], K = w.shape[2]
    cdef Py_ssize_t Lout = gy.shape[2]
    dtype = np.asarray(x).dtype
    gx_np = np.zeros((B, C, L), dtype=dtype)
    gw_np = np.zeros((Co, C, K), dtype=dtype)
    gb_np = np.zeros(Co, dtype=dtype)
    cdef real[:, :, ::1] gx = gx_np
    cdef real[:, :, ::1] gw = gw_np
    cdef real[::1] gb = gb_np
    cdef Py_ssize_t b, co, o, c, k, base, olo, ohi
    cdef real wv, acc
    for b in range(B):
        for co in range(Co):
            for o in range(Lout):
                gb[co] += gy[b, co, o]
        for c in range(C):
            for co in range(Co):
                for k in range(K):
                    base = k - pad
                    olo = _lo(k, pad, stride)
                    ohi = _hi(k, pad, stride, L, Lout)
                    wv = w[co, c, k]
                    acc = 0.0
                    for o in range(olo, ohi + 1):
                        acc += gy[b, co, o] * x[b, c, o * stride + base]
                        gx[b, c, o * stride + base] += wv * gy[b, co, o]
                    gw[co, c, k] += acc
    return gx_np, gw_np, gb_np


def conv2d_forward(real[:, :, :, ::1] x, real[:, :, :, ::1] w, real[::1] bias, int stride, int pad):
    cdef Py_ssize_t B = x.shape[0], C = x.shape[1], H = x.shape[2], W = x.shape[3]
    cdef Py_ssize_t Co = w.shape[0], Kh = w.shape[2], Kw = w.shape[3]
    cdef Py_ssize_t Ho = (H + 2 * pad - Kh) // stride + 1
    cdef Py_ssize_t Wo = (W + 2 * pad - Kw) // stride + 1
    out_np = np.empty((B, Co, Ho, Wo), dtype=np.asarray(x).dtype)
    cdef real[:, :, :, ::1] out = out_np
    cdef Py_ssize_t b, co, c, ky, kx, oy, ox, iy, xbase
    cdef Py_ssize_t oy_lo, oy_hi, ox_lo, ox_hi
    cdef real wv
    for b in range(B):
        for co in range(Co):
            for oy in range(Ho):
                for ox in range(Wo):
                    out[b, co, oy, ox] = bias[co]
        for c in range(C):
            for co in range(Co):
                for ky in range(Kh):
                    oy_lo = _lo(ky, pad, stride)
                    oy_hi = _hi(ky, pad, stride, H, Ho)
                    for kx in range(Kw):
                        wv = w[co, c, ky, kx]
                        xbase = kx - pad
                        ox_lo = _lo(kx, pad, stride)
                        ox_hi = _hi(kx, pad, stride, W, Wo)
                        for oy in range(oy_lo, oy_hi + 1):
                            iy = oy * stride + ky - pad
                            for ox in range(ox_lo, ox_hi + 1):
                                out[b, co, oy, ox] += wv * x[b, c, iy, ox * stride + xbase]
    return out_np


def conv2d_backward(real[:, :, :, ::1] x, real[:, :, :, ::1] w, real[:, :, :, ::1] gy,
                    int stride, int pad):
    cdef Py_ssize_t B = x.shape[0], C = x.shape[1], H = x.shape[2], W = x.shape[3]
    cdef Py_ssize_t Co = w.shape[0], Kh = w.shape[2], Kw = w.shape[3]
    cdef Py_ssize_t Ho = gy.shape[2], Wo = gy.shape[3]
    dtype = np.asarray(x).dtype
    gx_np = np.zeros((B, C, H, W), dtype=dtype)
    gw_np = np.zeros((Co, C, Kh, Kw), dtype=dtype)
    gb_np = np.zeros(Co, dtype=dtype)
    cdef real[:, :, :, ::1] gx = gx_np
    cdef real[:, :, :, ::1] gw = gw_np
    cdef real[::1] gb = gb_np
    cdef Py_ssize_t b, co, c, ky, kx, oy, ox, iy, xbase
    cdef Py_ssize_t oy_lo, oy_hi, ox_lo, ox_hi
    cdef real wv, acc, g
    for b in range(B):
        for co in range(Co):
            for oy in range(Ho):
                for ox in range(Wo):
                    gb[co] += gy[b, co, oy, ox]
        for c in range(C):
            for co in range(Co):
                for ky in range(Kh):
                    oy_lo = _lo(ky, pad, stride)
                    oy_hi = _hi(ky, pad, stride, H, Ho)
                    for kx in range(Kw):
                        wv = w[co, c, ky, kx]
                        xbase = kx - pad
                        ox_lo = _lo(kx, pad, stride)
                        ox_hi = _hi(kx, pad, stride, W, Wo)
                        acc = 0.0
                        for oy in range(oy_lo, oy_hi + 1):
                            iy = oy * stride + ky - pad
                            for ox in range(ox_lo, ox_hi + 1):
                                g = gy[b, co, oy, ox]
                                acc += g * x[b, c, iy, ox * stride + xbase]
                                gx[b, c, iy, ox * stride + xbase] += wv * g
                        gw[co, c, ky, kx] += acc
    return gx_np, gw_np, gb_np
