"""1D semi-classical Schrodinger operators on periodic grids.

The second-derivative matrix is the classical Fourier pseudo-spectral
construction for evenly spaced periodic grids (Trefethen, "Spectral Methods
in MATLAB", SIAM 2000; Weideman & Reddy's DMSuite). The operator
``-h^2 D2 - diag(c V)`` is dense and symmetric and is diagonalized with
LAPACK's symmetric eigensolver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import frozen_array
from .errors import DataError, NumericalError


@dataclass(frozen=True, eq=False)
class DiffMatrix:
    """Periodic pseudo-spectral second-derivative matrix on ``n`` points.

    ``entries`` is symmetric circulant; the constant vector is an eigenvector
    (equal row sums). ``delta`` is the physical sample spacing: the canonical
    matrix on [0, 2pi) is scaled by (2pi / (n delta))^2 so the matrix
    approximates d^2/dx^2 on the physical abscissa.
    """

    n: int
    delta: float
    entries: np.ndarray


@dataclass(frozen=True, eq=False)
class SchrodingerOperator1D:
    """Data for the dense operator ``-h^2 D2 - diag(c V)``.

    ``half_potential`` selects c = 1/2, used by the separated per-row and
    per-column operators of the 2D method; standalone 1D analysis uses c = 1.
    """

    h: float
    potential: np.ndarray
    diff: DiffMatrix
    half_potential: bool = False

    def __post_init__(self):
        if self.h <= 0:
            raise DataError(f"semi-classical parameter h must be > 0, got {self.h}")
        pot = frozen_array(self.potential)
        if pot.ndim != 1:
            raise DataError("potential must be a 1D vector")
        if pot.size != self.diff.n:
            raise DataError(
                f"potential length {pot.size} does not match grid size {self.diff.n}"
            )
        if not np.all(np.isfinite(pot)):
            raise DataError("potential contains non-finite values")
        if np.any(pot < 0):
            raise DataError("potential must be nonnegative")
        object.__setattr__(self, "potential", pot)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Retained eigenpairs (eigenvalue < lambda) of one 1D operator.

    ``eigenvalues`` is ascending and ``eigenvectors[:, k]`` belongs to
    ``eigenvalues[k]``. Vectors are normalized to the discrete L2 norm
    ``norm_weight * sum(v**2) == 1`` with the sign fixed so the first
    nonzero component is positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    count_negative: int
    norm_weight: float


def build_diff_matrix(n: int, delta: float) -> DiffMatrix:
    """Fourier pseudo-spectral second-derivative matrix for n periodic samples.

    On the canonical grid (spacing d = 2pi/n) the classical entries are, for
    even n, diagonal -pi^2/(3 d^2) - 1/6 and off-diagonal
    -(-1)^m / (2 sin^2(m d / 2)) at lag m; odd n uses the
    -(-1)^m cos(m d / 2) / (2 sin^2(m d / 2)) variant with diagonal
    -pi^2/(3 d^2) + 1/12. The result is scaled by (2pi/(n delta))^2.
    """
    if n < 2:
        raise DataError(f"grid size must be >= 2, got {n}")
    if delta <= 0:
        raise DataError(f"sample spacing must be > 0, got {delta}")

    d = 2.0 * math.pi / n
    m = np.arange(1, n // 2 + 1)
    sin2 = 2.0 * np.sin(m * (d / 2.0)) ** 2
    if n % 2 == 0:
        diag = -math.pi ** 2 / (3.0 * d * d) - 1.0 / 6.0
        off = -((-1.0) ** m) / sin2
    else:
        diag = -math.pi ** 2 / (3.0 * d * d) + 1.0 / 12.0
        off = -((-1.0) ** m) * np.cos(m * (d / 2.0)) / sin2

    # Index by canonical lag min(|j-k|, n-|j-k|): the matrix comes out exactly
    # symmetric and exactly circulant, not just up to rounding.
    by_lag = np.concatenate(([diag], off))
    lag = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    lag = np.minimum(lag, n - lag)
    entries = by_lag[lag] * (2.0 * math.pi / (n * delta)) ** 2
    return DiffMatrix(n=n, delta=float(delta), entries=frozen_array(entries))


def assemble_operator(op: SchrodingerOperator1D) -> np.ndarray:
    """Dense symmetric matrix ``-h^2 D2 - diag(c V)``, c = 1/2 iff half_potential."""
    factor = 0.5 if op.half_potential else 1.0
    matrix = (-op.h * op.h) * op.diff.entries
    idx = np.arange(op.diff.n)
    matrix[idx, idx] -= factor * op.potential
    return matrix


def negative_spectrum(op: SchrodingerOperator1D, lam: float = 0.0) -> SpectralDecomposition:
    """Eigenpairs of the assembled operator with eigenvalue strictly below ``lam``.

    The threshold is strict (an eigenvalue exactly equal to ``lam`` is
    dropped) up to a numerical-zero guard of n eps |M|_F, which keeps
    positive-semidefinite cases (zero potential) at an exact empty spectrum
    instead of retaining a roundoff-negative constant mode. An empty result
    (count_negative == 0) is valid. Raises NumericalError if LAPACK fails to
    converge.
    """
    if lam > 0:
        raise DataError(f"spectral threshold lambda must be <= 0, got {lam}")
    matrix = assemble_operator(op)
    try:
        eigvals, eigvecs = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"symmetric eigensolver failed on n={op.diff.n} operator "
            f"(h={op.h}, |M|_F={np.linalg.norm(matrix):.3e}): {exc}"
        ) from exc

    # Guard scales with the solver's eigenvalue error bound. The triangle
    # bound h^2 |D2|_F + |c V| (rather than |M|_F itself) is nondecreasing in
    # h, which keeps the retained count exactly monotone in h.
    factor = 0.5 if op.half_potential else 1.0
    guard = (
        op.diff.n
        * np.finfo(float).eps
        * (op.h * op.h * np.linalg.norm(op.diff.entries) + factor * np.linalg.norm(op.potential))
    )
    keep = eigvals < lam - guard
    values = eigvals[keep]
    vectors = eigvecs[:, keep] / math.sqrt(op.diff.delta)
    if vectors.size:
        # Sign convention: first nonzero component positive.
        lead_idx = (vectors != 0.0).argmax(axis=0)
        lead = vectors[lead_idx, np.arange(vectors.shape[1])]
        vectors[:, lead < 0.0] *= -1.0
    return SpectralDecomposition(
        eigenvalues=frozen_array(values),
        eigenvectors=frozen_array(vectors),
        count_negative=int(values.size),
        norm_weight=op.diff.delta,
    )
