"""Frame-quality metrics: MSE, PSNR, SSIM on uint8 images."""

import numpy as np

from ..errors import InputError

PSNR_CAP_DB = 100.0
SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_WINDOW = 7
DYNAMIC_RANGE = 255.0


def _check(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise InputError(f"frame shapes differ: {a.shape} vs {b.shape}")
    return a.astype(np.float64), b.astype(np.float64)


def mse(pred, truth) -> float:
    a, b = _check(pred, truth)
    return float(np.mean((a - b) ** 2))


def psnr(pred, truth) -> float:
    err = mse(pred, truth)
    if err < 1e-10:
        return PSNR_CAP_DB
    return float(10.0 * np.log10(DYNAMIC_RANGE**2 / err))


def _window_means(img, win):
    # uniform win x win averages over all fully valid positions
    csum = np.cumsum(np.cumsum(img, axis=0), axis=1)
    padded = np.zeros((img.shape[0] + 1, img.shape[1] + 1))
    padded[1:, 1:] = csum
    s = (padded[win:, win:] - padded[:-win, win:] - padded[win:, :-win]
         + padded[:-win, :-win])
    return s / (win * win)


def ssim(pred, truth, window: int = SSIM_WINDOW) -> float:
    """Mean structural similarity with a uniform window and standard constants."""
    a, b = _check(pred, truth)
    c1 = (SSIM_K1 * DYNAMIC_RANGE) ** 2
    c2 = (SSIM_K2 * DYNAMIC_RANGE) ** 2
    mu_a = _window_means(a, window)
    mu_b = _window_means(b, window)
    aa = _window_means(a * a, window) - mu_a**2
    bb = _window_means(b * b, window) - mu_b**2
    ab = _window_means(a * b, window) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * ab + c2)
    den = (mu_a**2 + mu_b**2 + c1) * (aa + bb + c2)
    return float(np.mean(num / den))


def frame_metrics(pred, truth):
    """(psnr_db, ssim, mse) for one frame pair."""
    return psnr(pred, truth), ssim(pred, truth), mse(pred, truth)
