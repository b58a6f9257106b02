"""Image quality measures: MSE, PSNR, windowed SSIM map and its mean.

SSIM uses the standard 11x11 Gaussian window (std 1.5) with stabilizers
(0.01 L)^2 and (0.03 L)^2. The map has the same shape as the input; windows
overlapping the border are renormalized over their in-bounds mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from ._util import as_pixels
from .errors import DataError

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
_K1 = 0.01
_K2 = 0.03


@dataclass(frozen=True)
class MetricBundle:
    """MSE, PSNR (dB) and mean SSIM of one image pair."""

    mse: float
    psnr_db: float
    mssim: float
    intensity_scale: float = 1.0


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    arr_a, arr_b = as_pixels(a), as_pixels(b)
    if arr_a.shape != arr_b.shape:
        raise DataError(f"image dimensions differ: {arr_a.shape} vs {arr_b.shape}")
    return arr_a, arr_b


def mse(a, b) -> float:
    """Mean squared pixel difference."""
    arr_a, arr_b = _pair(a, b)
    return float(np.mean((arr_a - arr_b) ** 2))


def psnr(a, b, intensity_scale: float = 1.0) -> float:
    """Peak signal-to-noise ratio 10 log10(L^2 / MSE); +inf for identical images."""
    err = mse(a, b)
    if err == 0.0:
        return math.inf
    return 10.0 * math.log10(intensity_scale * intensity_scale / err)


def _gaussian_taps() -> np.ndarray:
    radius = (SSIM_WINDOW - 1) / 2.0
    x = np.arange(SSIM_WINDOW) - radius
    taps = np.exp(-(x * x) / (2.0 * SSIM_SIGMA * SSIM_SIGMA))
    return taps / taps.sum()


def _window_mass(shape, taps) -> np.ndarray:
    # In-bounds window mass per pixel; separable, so an outer product of the
    # 1D masses is exact.
    rows = correlate1d(np.ones(shape[0]), taps, mode="constant", cval=0.0)
    cols = correlate1d(np.ones(shape[1]), taps, mode="constant", cval=0.0)
    return np.outer(rows, cols)


def ssim_map(a, b, intensity_scale: float = 1.0) -> np.ndarray:
    """Per-pixel structural similarity over sliding Gaussian windows.

    Inputs must lie in [0, intensity_scale]. The returned map is 1.0 where
    the windowed statistics agree (identical images give a map of ones).
    """
    arr_a, arr_b = _pair(a, b)
    scale = float(intensity_scale)
    for name, arr in (("first", arr_a), ("second", arr_b)):
        if arr.min() < 0.0 or arr.max() > scale:
            raise DataError(f"{name} image is outside [0, {scale}]")

    taps = _gaussian_taps()
    mass = _window_mass(arr_a.shape, taps)

    def smooth(x):
        out = correlate1d(x, taps, axis=0, mode="constant", cval=0.0)
        out = correlate1d(out, taps, axis=1, mode="constant", cval=0.0)
        return out / mass

    mu_a = smooth(arr_a)
    mu_b = smooth(arr_b)
    var_a = smooth(arr_a * arr_a) - mu_a * mu_a
    var_b = smooth(arr_b * arr_b) - mu_b * mu_b
    cov = smooth(arr_a * arr_b) - mu_a * mu_b

    c1 = (_K1 * scale) ** 2
    c2 = (_K2 * scale) ** 2
    return ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) / (
        (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    )


def mssim(a, b, intensity_scale: float = 1.0) -> float:
    """Mean of the SSIM map over all window positions."""
    return float(ssim_map(a, b, intensity_scale).mean())


def compare(a, b, intensity_scale: float = 1.0) -> MetricBundle:
    """All three measures of ``b`` against the reference ``a``."""
    return MetricBundle(
        mse=mse(a, b),
        psnr_db=psnr(a, b, intensity_scale),
        mssim=mssim(a, b, intensity_scale),
        intensity_scale=float(intensity_scale),
    )
