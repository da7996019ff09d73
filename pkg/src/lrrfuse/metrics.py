"""Reference-based image quality metrics: RMSE, PSNR, and single-scale SSIM.

PSNR uses peak 1.0 and is capped at 99 dB so identical images stay finite
and sortable. SSIM follows the standard configuration: 11x11 Gaussian window
with sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1.0, averaged over the
window-valid interior.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

PSNR_CAP = 99.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class MetricsReport:
    rmse: float
    psnr: float
    ssim: float


def _check_pair(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def rmse(a, b):
    """Root mean square error over all pixels."""
    a, b = _check_pair(a, b)
    return float(np.sqrt(np.mean((a - b) ** 2)))


def psnr(a, b):
    """Peak signal-to-noise ratio in dB with peak 1.0, capped at 99 dB."""
    a, b = _check_pair(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse <= 0.0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * np.log10(1.0 / mse))


def _window_1d():
    half = SSIM_WINDOW // 2
    xs = np.arange(-half, half + 1, dtype=float)
    k = np.exp(-0.5 * (xs / SSIM_SIGMA) ** 2)
    return k / k.sum()


def _smooth(img, kernel):
    out = ndimage.correlate1d(img, kernel, axis=0, mode="reflect")
    return ndimage.correlate1d(out, kernel, axis=1, mode="reflect")


def ssim(a, b):
    """Mean local structural similarity."""
    a, b = _check_pair(a, b)
    if min(a.shape) < SSIM_WINDOW:
        raise ValueError(f"image smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window: {a.shape}")
    k = _window_1d()
    ua = _smooth(a, k)
    ub = _smooth(b, k)
    uaa = _smooth(a * a, k)
    ubb = _smooth(b * b, k)
    uab = _smooth(a * b, k)
    va = uaa - ua * ua
    vb = ubb - ub * ub
    vab = uab - ua * ub
    c1 = SSIM_K1**2
    c2 = SSIM_K2**2
    s = ((2 * ua * ub + c1) * (2 * vab + c2)) / ((ua * ua + ub * ub + c1) * (va + vb + c2))
    half = SSIM_WINDOW // 2
    return float(s[half:-half, half:-half].mean())


def evaluate(img, reference):
    """All three metrics of an image against its reference."""
    return MetricsReport(rmse=rmse(img, reference), psnr=psnr(img, reference), ssim=ssim(img, reference))
