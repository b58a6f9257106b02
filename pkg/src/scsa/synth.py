"""Synthetic test inputs: an oscillatory analytic surface and checkerboards."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .scsa2d import Image

# The analytic surface sin(x^2/2 + y^2/4 + 3) cos(2x + 1 - e^y) + 1 has range
# [0, 2]; it is stored divided by this factor to fit the [0, 1] pixel contract.
EXAMPLE1_VALUE_SCALE = 2.0


@dataclass(frozen=True)
class GridSpec:
    """Uniformly sampled rectangle; defaults give the canonical 201x201 demo grid."""

    x_min: float = -1.0
    x_max: float = 3.0
    y_min: float = -1.0
    y_max: float = 3.0
    ts: float = 0.02

    def __post_init__(self):
        if self.ts <= 0:
            raise DataError(f"sample step must be > 0, got {self.ts}")
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise DataError("grid bounds must satisfy min < max")
        if self.n_x < 2 or self.n_y < 2:
            raise DataError("grid must contain at least 2 samples per axis")

    @staticmethod
    def _count(lo: float, hi: float, ts: float) -> int:
        # floor with a tiny slack so exact multiples survive roundoff
        # (e.g. 4.0 / 0.02 evaluating to 199.99999999999997).
        return int(math.floor((hi - lo) / ts + 1e-9)) + 1

    @property
    def n_x(self) -> int:
        return self._count(self.x_min, self.x_max, self.ts)

    @property
    def n_y(self) -> int:
        return self._count(self.y_min, self.y_max, self.ts)

    def x_axis(self) -> np.ndarray:
        return self.x_min + self.ts * np.arange(self.n_x)

    def y_axis(self) -> np.ndarray:
        return self.y_min + self.ts * np.arange(self.n_y)


def example1_raw(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """The analytic surface at meshgrid(x, y); values in [0, 2]."""
    grid_x, grid_y = np.meshgrid(x, y, indexing="ij")
    return (
        np.sin(0.5 * grid_x ** 2 + 0.25 * grid_y ** 2 + 3.0)
        * np.cos(2.0 * grid_x + 1.0 - np.exp(grid_y))
        + 1.0
    )


def example1_image(grid: GridSpec) -> Image:
    """Sample the analytic surface on the grid, normalized into [0, 1].

    Rows follow x, columns follow y. ``value_scale`` records the factor 2
    needed to report errors on the original scale.
    """
    values = example1_raw(grid.x_axis(), grid.y_axis())
    return Image(
        values / EXAMPLE1_VALUE_SCALE,
        delta=grid.ts,
        intensity_scale=1.0,
        value_scale=EXAMPLE1_VALUE_SCALE,
    )


def checkerboard(n: int, cell: int, low: float, high: float) -> Image:
    """n x n board of alternating cell x cell blocks at the two gray levels."""
    if n < 2:
        raise DataError(f"board size must be >= 2, got {n}")
    if not 1 <= cell <= n:
        raise DataError(f"cell size must be in [1, {n}], got {cell}")
    if not (0.0 <= low < high <= 1.0):
        raise DataError(f"need 0 <= low < high <= 1, got low={low} high={high}")
    idx = np.arange(n) // cell
    odd_block = (idx[:, None] + idx[None, :]) % 2 == 1
    pixels = np.where(odd_block, high, low)
    return Image(pixels, delta=1.0, intensity_scale=1.0)
