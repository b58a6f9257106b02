"""Seeded additive Gaussian white noise and SNR, for denoising experiments.

The generator is numpy's PCG64 behind ``numpy.random.default_rng``; normal
samples come from its ziggurat implementation. Record ``PRNG_NAME`` and the
numpy version alongside the seed to make runs reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import as_pixels
from .errors import DataError
from .scsa2d import Image

PRNG_NAME = "numpy.random.Generator(PCG64).standard_normal"


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian noise level on the 0-255 scale, seed, and clipping policy."""

    sigma_255: float
    seed: int = 0
    clip: bool = True

    def __post_init__(self):
        if self.sigma_255 < 0:
            raise DataError(f"sigma must be >= 0, got {self.sigma_255}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DataError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


def add_noise(img: Image, spec: NoiseSpec) -> Image:
    """Add i.i.d. zero-mean Gaussian noise with std ``sigma_255 / 255``.

    Deterministic for a given seed. With ``clip`` the result is forced back
    into [0, 1] (matching 8-bit acquisition); without it the raw noisy values
    are kept, which is the right choice when measuring injected-noise power.
    """
    if spec.sigma_255 == 0:
        return img
    rng = np.random.default_rng(int(spec.seed))
    noisy = img.pixels + rng.standard_normal(img.pixels.shape) * (spec.sigma_255 / 255.0)
    if spec.clip:
        noisy = np.clip(noisy, 0.0, 1.0)
    return Image(
        noisy,
        delta=img.delta,
        intensity_scale=img.intensity_scale,
        value_scale=img.value_scale,
        validate_range=spec.clip,
    )


def snr_db(clean, noisy) -> float:
    """Signal power over noise power in dB: 10 log10(sum c^2 / sum (n - c)^2)."""
    arr_c, arr_n = as_pixels(clean), as_pixels(noisy)
    if arr_c.shape != arr_n.shape:
        raise DataError(f"image dimensions differ: {arr_c.shape} vs {arr_n.shape}")
    noise_power = float(np.sum((arr_n - arr_c) ** 2))
    if noise_power == 0.0:
        return math.inf
    return 10.0 * math.log10(float(np.sum(arr_c ** 2)) / noise_power)
