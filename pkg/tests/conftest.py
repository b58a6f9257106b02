from pathlib import Path

import numpy as np
import pytest

from scsa import GridSpec, Image, example1_image, imageio

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def cam128() -> Image:
    """128x128 crop of the public-domain cameraman photo (8-bit grayscale)."""
    return imageio.load(DATA_DIR / "cam128.pgm")


@pytest.fixture(scope="session")
def example1_64() -> Image:
    """The analytic demo surface sampled on a 64x64 grid over [-1, 3]^2."""
    return example1_image(GridSpec(ts=4.0 / 63.0))


@pytest.fixture(scope="session")
def example1_full() -> Image:
    """The canonical 201x201 sampling (step 0.02) of the analytic surface."""
    return example1_image(GridSpec())


def random_image(seed: int, rows: int, cols: int, lo: float = 0.05, hi: float = 1.0) -> Image:
    rng = np.random.default_rng(seed)
    return Image(rng.uniform(lo, hi, (rows, cols)))
