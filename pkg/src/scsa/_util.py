"""Small internal helpers."""

import numpy as np


def frozen_array(values, dtype=float):
    """Contiguous read-only copy; keeps the frozen dataclasses actually immutable."""
    arr = np.array(values, dtype=dtype, order="C")
    arr.flags.writeable = False
    return arr


def as_pixels(obj):
    """Accept either an Image-like object (``.pixels``) or a bare 2D array."""
    arr = obj.pixels if hasattr(obj, "pixels") else np.asarray(obj, dtype=float)
    return arr
