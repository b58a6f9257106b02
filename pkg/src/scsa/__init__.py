"""Signal and image reconstruction from semi-classical Schrodinger spectra.

A positive signal (or each row/column of an image) is taken as the potential
of the operator ``-h^2 D2 - c V`` on a periodic grid; the signal is rebuilt
from the eigenvalues below a threshold and the squared normalized
eigenvectors. Includes noise injection, quality metrics, parameter sweeps,
PGM/PNG I/O and a command-line interface.
"""

__version__ = "0.1.0"

from .errors import DataError, FormatError, NumericalError, ScsaError
from .metrics import MetricBundle, compare, mse, mssim, psnr, ssim_map
from .noise import PRNG_NAME, NoiseSpec, add_noise, snr_db
from .scsa1d import ScsaParams, Slice1D, reconstruct_1d, semiclassical_constant_1d
from .scsa2d import (
    EigenfunctionField,
    Image,
    ReconstructionReport,
    SeparatedSpectra,
    decompose_image,
    export_eigenfunction,
    reconstruct_2d,
    reconstruct_from_spectra,
    semiclassical_constant_2d,
    with_metrics,
)
from .spectral import (
    DiffMatrix,
    SchrodingerOperator1D,
    SpectralDecomposition,
    assemble_operator,
    build_diff_matrix,
    negative_spectrum,
)
from .synth import EXAMPLE1_VALUE_SCALE, GridSpec, checkerboard, example1_image, example1_raw
from .tuning import SweepCell, SweepResult, SweepSpec, pick_best, sweep, write_csv

__all__ = [
    "DataError", "FormatError", "NumericalError", "ScsaError",
    "MetricBundle", "compare", "mse", "mssim", "psnr", "ssim_map",
    "PRNG_NAME", "NoiseSpec", "add_noise", "snr_db",
    "ScsaParams", "Slice1D", "reconstruct_1d", "semiclassical_constant_1d",
    "EigenfunctionField", "Image", "ReconstructionReport", "SeparatedSpectra",
    "decompose_image", "export_eigenfunction", "reconstruct_2d",
    "reconstruct_from_spectra", "semiclassical_constant_2d", "with_metrics",
    "DiffMatrix", "SchrodingerOperator1D", "SpectralDecomposition",
    "assemble_operator", "build_diff_matrix", "negative_spectrum",
    "EXAMPLE1_VALUE_SCALE", "GridSpec", "checkerboard", "example1_image", "example1_raw",
    "SweepCell", "SweepResult", "SweepSpec", "pick_best", "sweep", "write_csv",
    "__version__",
]
