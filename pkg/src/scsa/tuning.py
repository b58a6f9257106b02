"""Grid search over (h, gamma) against a reference image.

Spectra depend on h only, so they are computed once per h and reused for
every gamma; metrics are evaluated on the export-clamped reconstruction.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, replace

import numpy as np

from ._util import frozen_array
from .errors import DataError, NumericalError
from . import metrics
from .scsa1d import ScsaParams
from .scsa2d import Image, decompose_image, reconstruct_from_spectra

OBJECTIVES = ("min-mse", "max-psnr", "max-mssim")
CSV_HEADER = ("h", "gamma", "mse", "psnr_db", "mssim", "total_neg_eigs", "wall_time_s")


@dataclass(frozen=True, eq=False)
class SweepSpec:
    """Search grid, objective, and the clean reference to score against."""

    h_values: np.ndarray
    gamma_values: np.ndarray
    objective: str
    reference: Image

    def __post_init__(self):
        h_values = frozen_array(self.h_values)
        gamma_values = frozen_array(self.gamma_values)
        if h_values.size == 0 or gamma_values.size == 0:
            raise DataError("h and gamma grids must be nonempty")
        if np.any(h_values <= 0) or np.any(np.diff(h_values) <= 0):
            raise DataError("h grid must be positive and strictly ascending")
        if np.any(gamma_values <= 0):
            raise DataError("gamma grid must be positive")
        if self.objective not in OBJECTIVES:
            raise DataError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        object.__setattr__(self, "h_values", h_values)
        object.__setattr__(self, "gamma_values", gamma_values)


@dataclass(frozen=True)
class SweepCell:
    """One evaluated (h, gamma) grid point."""

    h: float
    gamma: float
    mse: float
    psnr_db: float
    mssim: float
    total_neg_eigs: int
    wall_time_s: float


@dataclass(frozen=True, eq=False)
class SweepResult:
    """All evaluated cells (grid order) and the winning (h, gamma)."""

    table: tuple[SweepCell, ...]
    best: tuple[float, float]
    objective: str

    def best_cell(self) -> SweepCell:
        best_h, best_gamma = self.best
        for cell in self.table:
            if cell.h == best_h and cell.gamma == best_gamma:
                return cell
        raise DataError("best (h, gamma) missing from table")  # unreachable


def _cell_key(objective):
    # Ties break toward smaller h, then smaller gamma.
    if objective == "min-mse":
        return lambda c: (c.mse, c.h, c.gamma)
    if objective == "max-psnr":
        return lambda c: (-c.psnr_db, c.h, c.gamma)
    return lambda c: (-c.mssim, c.h, c.gamma)


def pick_best(table, objective: str) -> SweepCell:
    """Best cell under the objective with the declared deterministic tie-break."""
    if objective not in OBJECTIVES:
        raise DataError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    if not table:
        raise DataError("empty sweep table")
    return min(table, key=_cell_key(objective))


def sweep(img: Image, spec: SweepSpec, params_base: ScsaParams, workers: int | None = None) -> SweepResult:
    """Evaluate every (h, gamma) cell and score against the reference.

    Errors from the reconstruction are re-raised tagged with the offending
    grid point. Per-cell wall time covers the combination and metric step plus
    an equal share of that h's decomposition time.
    """
    if spec.reference.pixels.shape != img.pixels.shape:
        raise DataError(
            f"reference dimensions {spec.reference.pixels.shape} do not match "
            f"image {img.pixels.shape}"
        )
    cells = []
    for h in spec.h_values:
        started = time.perf_counter()
        params_h = replace(params_base, h=float(h))
        try:
            spectra = decompose_image(img, params_h, workers=workers)
        except (DataError, NumericalError) as exc:
            raise type(exc)(f"(h={h}): {exc}") from exc
        decompose_share = (time.perf_counter() - started) / spec.gamma_values.size
        total_neg = spectra.total_negative()
        for gamma in spec.gamma_values:
            cell_start = time.perf_counter()
            params_cell = replace(params_h, gamma=float(gamma))
            try:
                raw = reconstruct_from_spectra(spectra, params_cell)
            except (DataError, NumericalError) as exc:
                raise type(exc)(f"(h={h}, gamma={gamma}): {exc}") from exc
            clamped = np.clip(raw, 0.0, 1.0)
            bundle = metrics.compare(spec.reference.pixels, clamped)
            cells.append(
                SweepCell(
                    h=float(h),
                    gamma=float(gamma),
                    mse=bundle.mse,
                    psnr_db=bundle.psnr_db,
                    mssim=bundle.mssim,
                    total_neg_eigs=total_neg,
                    wall_time_s=time.perf_counter() - cell_start + decompose_share,
                )
            )
    best = pick_best(cells, spec.objective)
    return SweepResult(table=tuple(cells), best=(best.h, best.gamma), objective=spec.objective)


def write_csv(result: SweepResult, path) -> None:
    """Write the sweep table with the fixed column set."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER)
        for cell in result.table:
            writer.writerow(
                [
                    repr(cell.h),
                    repr(cell.gamma),
                    repr(cell.mse),
                    repr(cell.psnr_db),
                    repr(cell.mssim),
                    cell.total_neg_eigs,
                    repr(cell.wall_time_s),
                ]
            )
