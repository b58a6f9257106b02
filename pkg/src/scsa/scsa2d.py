"""Pixelwise 2D reconstruction from per-row and per-column 1D spectra.

Each row and each column of the image is used (halved) as the potential of
its own 1D operator; the image estimate at pixel (i, j) combines the
negative eigenvalues of row i and column j with the squared eigenvector
products. Rows and columns are independent, so the decompositions are
computed once per slice and may run concurrently.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import InitVar, dataclass, replace

import numpy as np

from ._util import frozen_array
from .errors import DataError, NumericalError
from .metrics import MetricBundle
from .scsa1d import ScsaParams
from .spectral import (
    SchrodingerOperator1D,
    SpectralDecomposition,
    build_diff_matrix,
    negative_spectrum,
)

# Largest gamma treated as an integer for the separable binomial evaluation.
_MAX_BINOMIAL_GAMMA = 64


@dataclass(frozen=True, eq=False)
class Image:
    """Grayscale image on [0, 1] with pixel spacing and reporting metadata.

    ``intensity_scale`` records the source dynamic range (1 or 255) and
    ``value_scale`` the factor that maps pixels back to original physical
    values (used by synthetic inputs that were normalized into [0, 1]).
    Construct with ``validate_range=False`` for raw reconstruction output,
    which may overshoot [0, 1] and is only clamped at export time.
    """

    pixels: np.ndarray
    delta: float = 1.0
    intensity_scale: float = 1.0
    value_scale: float = 1.0
    validate_range: InitVar[bool] = True

    def __post_init__(self, validate_range):
        arr = frozen_array(self.pixels)
        if arr.ndim != 2:
            raise DataError("pixels must be a 2D matrix")
        if arr.shape[0] < 2 or arr.shape[1] < 2:
            raise DataError(f"image must be at least 2x2, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DataError("pixels contain non-finite values")
        if validate_range and (arr.min() < 0.0 or arr.max() > 1.0):
            raise DataError("pixels must lie in [0, 1]")
        if self.delta <= 0:
            raise DataError(f"delta must be > 0, got {self.delta}")
        object.__setattr__(self, "pixels", arr)

    @property
    def rows(self) -> int:
        return self.pixels.shape[0]

    @property
    def cols(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True, eq=False)
class SeparatedSpectra:
    """Per-row and per-column decompositions (half potential) of one image."""

    row_spectra: tuple[SpectralDecomposition, ...]
    col_spectra: tuple[SpectralDecomposition, ...]

    @property
    def rows(self) -> int:
        return len(self.row_spectra)

    @property
    def cols(self) -> int:
        return len(self.col_spectra)

    def total_negative(self) -> int:
        return sum(d.count_negative for d in self.row_spectra) + sum(
            d.count_negative for d in self.col_spectra
        )


@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    """Raw reconstruction plus per-slice bookkeeping.

    ``reconstructed.pixels`` keeps unclamped values; clamping to [0, 1]
    happens only when exporting or computing metrics. Slices with an empty
    negative spectrum contribute nothing and are counted separately.
    """

    reconstructed: Image
    neg_counts_rows: np.ndarray
    neg_counts_cols: np.ndarray
    params: ScsaParams
    empty_row_count: int
    empty_col_count: int
    metrics: MetricBundle | None = None


@dataclass(frozen=True, eq=False)
class EigenfunctionField:
    """Product field of one (row, column) eigenpair over the whole image.

    ``values[i, j]`` is row i's eigenvector n evaluated at j times column j's
    eigenvector m evaluated at i; ``defined`` flags pixels whose two slices
    both own the requested eigenpair (others are zero).
    """

    values: np.ndarray
    defined: np.ndarray


def semiclassical_constant_2d(gamma: float) -> float:
    """The 2D normalization constant Gamma(g+1) / (4 pi Gamma(g+2)) = 1 / (4 pi (g+1))."""
    if gamma <= 0:
        raise DataError(f"gamma must be > 0 in 2D, got {gamma}")
    return 1.0 / (4.0 * math.pi * (gamma + 1.0))


def _check_params(img: Image, params: ScsaParams):
    if img.delta != params.delta:
        raise DataError(
            f"image spacing {img.delta} does not match params.delta {params.delta}"
        )


def decompose_image(img: Image, params: ScsaParams, workers: int | None = None) -> SeparatedSpectra:
    """Solve the per-row and per-column eigenproblems (potential halved).

    ``workers`` > 1 fans the independent slices out to a thread pool; results
    are assembled in slice order, so the output is identical to a serial run.
    """
    _check_params(img, params)
    row_diff = build_diff_matrix(img.cols, params.delta)
    col_diff = build_diff_matrix(img.rows, params.delta) if img.rows != img.cols else row_diff

    def solve(task):
        tag, index, potential, diff = task
        try:
            op = SchrodingerOperator1D(
                h=params.h, potential=potential, diff=diff, half_potential=True
            )
            return negative_spectrum(op, lam=params.lam)
        except NumericalError as exc:
            raise NumericalError(f"{tag} {index}: {exc}") from exc

    tasks = [("row", i, img.pixels[i, :], row_diff) for i in range(img.rows)]
    tasks += [("column", j, img.pixels[:, j], col_diff) for j in range(img.cols)]
    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            solved = list(pool.map(solve, tasks))
    else:
        solved = [solve(t) for t in tasks]
    return SeparatedSpectra(
        row_spectra=tuple(solved[: img.rows]),
        col_spectra=tuple(solved[img.rows :]),
    )


def _check_threshold(spectra: SeparatedSpectra, lam: float):
    # Guards the positivity of every (lam - (kappa + rho)) base: retained
    # eigenvalues must sit strictly below the threshold.
    for tag, group in (("row", spectra.row_spectra), ("column", spectra.col_spectra)):
        for index, dec in enumerate(group):
            if dec.count_negative and dec.eigenvalues.max() >= lam:
                raise NumericalError(
                    f"{tag} {index}: retained eigenvalue >= lambda ({lam}); "
                    "spectra are inconsistent with the reconstruction threshold"
                )


def _combine_binomial(spectra: SeparatedSpectra, gamma: int, lam: float) -> np.ndarray:
    # (u + t)^g with u = lam - kappa, t = -rho expands binomially, which
    # separates the double sum into g+1 products of per-row and per-column
    # moment maps. Exact for integer gamma and much faster than the pixel loop.
    rows, cols = spectra.rows, spectra.cols
    row_moments = np.zeros((gamma + 1, rows, cols))
    col_moments = np.zeros((gamma + 1, cols, rows))
    for i, dec in enumerate(spectra.row_spectra):
        if dec.count_negative == 0:
            continue
        u = lam - dec.eigenvalues
        squares = dec.eigenvectors ** 2
        for a in range(gamma + 1):
            row_moments[a, i, :] = squares @ (u ** a)
    for j, dec in enumerate(spectra.col_spectra):
        if dec.count_negative == 0:
            continue
        t = -dec.eigenvalues
        squares = dec.eigenvectors ** 2
        for b in range(gamma + 1):
            col_moments[b, j, :] = squares @ (t ** b)
    total = np.zeros((rows, cols))
    for a in range(gamma + 1):
        total += math.comb(gamma, a) * row_moments[a] * col_moments[gamma - a].T
    return total


def _combine_generic(spectra: SeparatedSpectra, gamma: float, lam: float) -> np.ndarray:
    rows, cols = spectra.rows, spectra.cols
    row_data = [(lam - d.eigenvalues, d.eigenvectors ** 2) for d in spectra.row_spectra]
    col_data = [(-d.eigenvalues, d.eigenvectors ** 2) for d in spectra.col_spectra]
    total = np.zeros((rows, cols))
    for i in range(rows):
        u, row_sq = row_data[i]
        if u.size == 0:
            continue
        for j in range(cols):
            t, col_sq = col_data[j]
            if t.size == 0:
                continue
            base = np.clip(u[:, None] + t[None, :], 0.0, None) ** gamma
            total[i, j] = row_sq[j, :] @ base @ col_sq[i, :]
    return total


def reconstruct_from_spectra(spectra: SeparatedSpectra, params: ScsaParams) -> np.ndarray:
    """Raw pixelwise combination of already-computed spectra.

    Separated out so parameter sweeps can reuse the expensive decompositions:
    gamma and the normalization only affect this step.
    """
    gamma = params.gamma
    if gamma <= 0:
        raise DataError(f"gamma must be > 0 in 2D, got {gamma}")
    _check_threshold(spectra, params.lam)
    rounded = round(gamma)
    if abs(gamma - rounded) < 1e-12 and 1 <= rounded <= _MAX_BINOMIAL_GAMMA:
        total = _combine_binomial(spectra, int(rounded), params.lam)
    else:
        total = _combine_generic(spectra, gamma, params.lam)
    prefactor = (params.h * params.h) / semiclassical_constant_2d(gamma)
    # Empty slices leave total at 0, so those pixels land exactly at -lam.
    return -params.lam + (prefactor * np.clip(total, 0.0, None)) ** (1.0 / (1.0 + gamma))


def reconstruct_2d(img: Image, params: ScsaParams, workers: int | None = None) -> ReconstructionReport:
    """Decompose an image and reconstruct it pixel by pixel.

    Returns the raw (unclamped) reconstruction together with the per-slice
    negative-eigenvalue counts and the number of rows/columns whose spectrum
    came up empty.
    """
    spectra = decompose_image(img, params, workers=workers)
    raw = reconstruct_from_spectra(spectra, params)
    counts_rows = np.array([d.count_negative for d in spectra.row_spectra], dtype=int)
    counts_cols = np.array([d.count_negative for d in spectra.col_spectra], dtype=int)
    reconstructed = Image(
        raw,
        delta=img.delta,
        intensity_scale=img.intensity_scale,
        value_scale=img.value_scale,
        validate_range=False,
    )
    return ReconstructionReport(
        reconstructed=reconstructed,
        neg_counts_rows=frozen_array(counts_rows, dtype=int),
        neg_counts_cols=frozen_array(counts_cols, dtype=int),
        params=params,
        empty_row_count=int(np.count_nonzero(counts_rows == 0)),
        empty_col_count=int(np.count_nonzero(counts_cols == 0)),
    )


def with_metrics(report: ReconstructionReport, bundle: MetricBundle) -> ReconstructionReport:
    """Copy of the report with quality metrics attached."""
    return replace(report, metrics=bundle)


def export_eigenfunction(spectra: SeparatedSpectra, n: int, m: int) -> EigenfunctionField:
    """Assemble the product field of row eigenpair ``n`` and column eigenpair ``m``.

    Indices count from 0 at the most negative eigenvalue. Pixels whose row or
    column slice lacks the requested eigenpair are zero with ``defined``
    False; it is an error only if no pixel is defined at all.
    """
    if n < 0 or m < 0:
        raise DataError(f"eigenpair indices must be >= 0, got ({n}, {m})")
    rows, cols = spectra.rows, spectra.cols
    row_part = np.zeros((rows, cols))
    row_has = np.zeros(rows, dtype=bool)
    for i, dec in enumerate(spectra.row_spectra):
        if n < dec.count_negative:
            row_part[i, :] = dec.eigenvectors[:, n]
            row_has[i] = True
    col_part = np.zeros((rows, cols))
    col_has = np.zeros(cols, dtype=bool)
    for j, dec in enumerate(spectra.col_spectra):
        if m < dec.count_negative:
            col_part[:, j] = dec.eigenvectors[:, m]
            col_has[j] = True
    defined = np.outer(row_has, col_has)
    if not defined.any():
        raise DataError(f"eigenpair ({n}, {m}) is absent from every row/column pair")
    return EigenfunctionField(values=row_part * col_part, defined=defined)
