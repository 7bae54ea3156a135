# edibnet/metrics/quality.py
from functools import lru_cache
import math

import numpy as np
from scipy.signal import convolve2d

from ..errors import ConfigError, ShapeError
from ..tensor import Tensor

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _check_pair(op: str, a: Tensor, b: Tensor, peak: float) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} differ")
    if peak <= 0:
        raise ConfigError(f"{op}: peak must be positive, got {peak}")


def psnr(a: Tensor, b: Tensor, peak: float = 1.0) -> float:
    """10*log10(peak^2 / MSE) in dB; identical inputs give math.inf."""
    _check_pair("psnr", a, b, peak)
    diff = a.data.astype(np.float64) - b.data.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


@lru_cache(maxsize=4)
def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    m = (size - 1) / 2.0
    y, x = np.ogrid[-m:m + 1, -m:m + 1]
    h = np.exp(-(x * x + y * y) / (2.0 * sigma * sigma))
    h[h < np.finfo(h.dtype).eps * h.max()] = 0
    h /= h.sum()
    h.setflags(write=False)
    return h


def _filter(x: np.ndarray, window: np.ndarray) -> np.ndarray:
    return convolve2d(x, np.rot90(window, 2), mode="valid")


def ssim_map(a: np.ndarray, b: np.ndarray, peak: float = 1.0) -> np.ndarray:
    """Local SSIM of two 2-D planes over the 'valid' window positions."""
    window = gaussian_window()
    c1 = (SSIM_K1 * peak) ** 2
    c2 = (SSIM_K2 * peak) ** 2
    mu1 = _filter(a, window)
    mu2 = _filter(b, window)
    mu1_sq = mu1 * mu1
    mu2_sq = mu2 * mu2
    mu1_mu2 = mu1 * mu2
    sigma1_sq = _filter(a * a, window) - mu1_sq
    sigma2_sq = _filter(b * b, window) - mu2_sq
    sigma12 = _filter(a * b, window) - mu1_mu2
    return ((2 * mu1_mu2 + c1) * (2 * sigma12 + c2)) / ((mu1_sq + mu2_sq + c1) * (sigma1_sq + sigma2_sq + c2))


def ssim(a: Tensor, b: Tensor, peak: float = 1.0) -> float:
    """Mean local SSIM (11x11 Gaussian window, sigma 1.5), per channel, averaged over channels and samples."""
    _check_pair("ssim", a, b, peak)
    n, c, h, w = a.shape
    if h < SSIM_WINDOW or w < SSIM_WINDOW:
        raise ShapeError(f"ssim: image {h}x{w} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")
    ad = a.data.astype(np.float64)
    bd = b.data.astype(np.float64)
    values = [ssim_map(ad[i, j], bd[i, j], peak).mean() for i in range(n) for j in range(c)]
    return float(np.mean(values))
