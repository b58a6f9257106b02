import numpy as np
import pytest

from scsa import (
    DataError,
    Image,
    NumericalError,
    ScsaParams,
    SpectralDecomposition,
    decompose_image,
    export_eigenfunction,
    reconstruct_2d,
    reconstruct_from_spectra,
    semiclassical_constant_2d,
)
from scsa.scsa2d import SeparatedSpectra, _combine_binomial, _combine_generic

import oracles
from conftest import random_image


# ---------------------------------------------------------------------------
# the universal constant


def test_constant_2d_values():
    assert semiclassical_constant_2d(1.0) == pytest.approx(1.0 / (8.0 * np.pi), rel=1e-12)
    assert semiclassical_constant_2d(4.0) == pytest.approx(1.0 / (20.0 * np.pi), rel=1e-12)


@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0, 4.0, 7.5])
def test_constant_2d_recurrence(gamma):
    ratio = semiclassical_constant_2d(gamma) / semiclassical_constant_2d(gamma + 1.0)
    assert ratio == pytest.approx((gamma + 2.0) / (gamma + 1.0), rel=1e-12)


def test_constant_2d_requires_positive_gamma():
    with pytest.raises(DataError):
        semiclassical_constant_2d(0.0)


# ---------------------------------------------------------------------------
# image type


def test_image_validation():
    with pytest.raises(DataError):
        Image(np.full((2, 2), 1.5))
    with pytest.raises(DataError):
        Image(np.full((1, 4), 0.5))
    with pytest.raises(DataError):
        Image(np.full((4, 4), 0.5), delta=0.0)
    raw = Image(np.full((2, 2), 1.5), validate_range=False)  # reconstruction output
    assert raw.pixels.max() == 1.5


# ---------------------------------------------------------------------------
# decomposition


def test_zero_image_all_slices_empty():
    img = Image(np.zeros((8, 8)))
    spectra = decompose_image(img, ScsaParams(h=0.5, gamma=4.0))
    assert all(d.count_negative == 0 for d in spectra.row_spectra)
    assert all(d.count_negative == 0 for d in spectra.col_spectra)


def test_constant_image_analytic_counts():
    c, h = 0.8, 0.5  # h^2 (2 pi / 8)^2 < 0.4, so at least k = 0 binds
    img = Image(np.full((8, 8), c))
    spectra = decompose_image(img, ScsaParams(h=h, gamma=4.0))
    expected = oracles.count_constant_negative(8, 1.0, h, c, 0.0, half=True)
    assert expected >= 1
    for dec in spectra.row_spectra + spectra.col_spectra:
        assert dec.count_negative == expected


def test_decompose_rectangular_shapes():
    img = random_image(2, 6, 9)
    spectra = decompose_image(img, ScsaParams(h=0.3, gamma=4.0))
    assert spectra.rows == 6 and spectra.cols == 9
    assert spectra.row_spectra[0].eigenvectors.shape[0] == 9
    assert spectra.col_spectra[0].eigenvectors.shape[0] == 6


def test_parallel_decomposition_is_bit_identical():
    img = random_image(3, 16, 16)
    params = ScsaParams(h=0.25, gamma=4.0)
    serial = decompose_image(img, params)
    threaded = decompose_image(img, params, workers=4)
    for a, b in zip(
        serial.row_spectra + serial.col_spectra,
        threaded.row_spectra + threaded.col_spectra,
    ):
        assert (a.eigenvalues == b.eigenvalues).all()
        assert (a.eigenvectors == b.eigenvectors).all()


def test_counts_monotone_componentwise_in_h():
    img = random_image(4, 12, 12)
    counts = []
    for h in [0.2, 0.4, 0.8]:
        spectra = decompose_image(img, ScsaParams(h=h, gamma=4.0))
        counts.append([d.count_negative for d in spectra.row_spectra + spectra.col_spectra])
    for smaller_h, larger_h in zip(counts, counts[1:]):
        assert all(a >= b for a, b in zip(smaller_h, larger_h))


# ---------------------------------------------------------------------------
# reconstruction


def test_zero_image_reconstructs_to_zero():
    img = Image(np.zeros((8, 8)))
    report = reconstruct_2d(img, ScsaParams(h=0.5, gamma=4.0))
    assert (report.reconstructed.pixels == 0.0).all()
    assert report.empty_row_count == 8 and report.empty_col_count == 8


@pytest.mark.parametrize(
    "seed,rows,cols,gamma,lam",
    [
        (10, 8, 8, 4.0, 0.0),
        (11, 9, 9, 1.0, 0.0),
        (12, 12, 12, 2.0, -0.05),
        (13, 16, 16, 4.0, 0.0),
        (14, 10, 14, 3.0, 0.0),
        (15, 8, 8, 2.5, 0.0),  # non-integer gamma exercises the generic path
    ],
)
def test_matches_naive_quadruple_loop(seed, rows, cols, gamma, lam):
    img = random_image(seed, rows, cols)
    h = 0.35
    report = reconstruct_2d(img, ScsaParams(h=h, gamma=gamma, lam=lam))
    expected = oracles.naive_reconstruct_2d(img.pixels, h, gamma, lam, 1.0)
    assert np.abs(report.reconstructed.pixels - expected).max() <= 1e-10


@pytest.mark.parametrize("gamma", [1, 2, 4, 6])
def test_binomial_and_generic_paths_agree(gamma):
    img = random_image(21, 10, 10)
    spectra = decompose_image(img, ScsaParams(h=0.3, gamma=float(gamma)))
    fast = _combine_binomial(spectra, gamma, 0.0)
    slow = _combine_generic(spectra, float(gamma), 0.0)
    assert np.abs(fast - slow).max() <= 1e-12 * max(1.0, slow.max())


def test_transpose_symmetry():
    img = random_image(31, 9, 13)
    params = ScsaParams(h=0.3, gamma=4.0)
    direct = reconstruct_2d(img, params).reconstructed.pixels
    flipped = reconstruct_2d(Image(img.pixels.T), params).reconstructed.pixels
    assert np.allclose(direct, flipped.T, rtol=1e-12, atol=1e-14)


def test_reconstruction_deterministic_and_parallel_equal():
    img = random_image(41, 12, 12)
    params = ScsaParams(h=0.3, gamma=4.0)
    a = reconstruct_2d(img, params).reconstructed.pixels
    b = reconstruct_2d(img, params).reconstructed.pixels
    c = reconstruct_2d(img, params, workers=4).reconstructed.pixels
    assert (a == b).all()
    assert (a == c).all()


def test_empty_row_pixels_fall_back_to_minus_lambda():
    pixels = random_image(51, 8, 8).pixels.copy()
    pixels[3, :] = 0.0  # black row: no bound state on that slice
    img = Image(pixels)
    report = reconstruct_2d(img, ScsaParams(h=0.5, gamma=4.0))
    assert report.empty_row_count == 1
    assert report.neg_counts_rows[3] == 0
    assert (report.reconstructed.pixels[3, :] == 0.0).all()


def test_negative_lambda_floor():
    img = random_image(61, 8, 8, lo=0.0, hi=0.05)
    lam = -0.4  # potential too weak to push eigenvalues below lambda
    report = reconstruct_2d(img, ScsaParams(h=1.0, gamma=4.0, lam=lam))
    assert (report.reconstructed.pixels == -lam).all()


def test_threshold_guard_rejects_inconsistent_spectra():
    img = random_image(71, 8, 8)
    spectra = decompose_image(img, ScsaParams(h=0.3, gamma=4.0))
    bad = SpectralDecomposition(
        eigenvalues=np.array([0.25]),  # above lambda = 0
        eigenvectors=np.ones((8, 1)),
        count_negative=1,
        norm_weight=1.0,
    )
    tampered = SeparatedSpectra(
        row_spectra=(bad,) + spectra.row_spectra[1:],
        col_spectra=spectra.col_spectra,
    )
    with pytest.raises(NumericalError):
        reconstruct_from_spectra(tampered, ScsaParams(h=0.3, gamma=4.0))


def test_delta_mismatch_rejected():
    img = random_image(81, 8, 8)
    with pytest.raises(DataError):
        decompose_image(img, ScsaParams(h=0.3, gamma=4.0, delta=0.5))


# ---------------------------------------------------------------------------
# eigenfunction export


def test_export_constant_image_ground_state_uniform():
    img = Image(np.full((12, 12), 0.9))
    spectra = decompose_image(img, ScsaParams(h=0.6, gamma=4.0))
    field = export_eigenfunction(spectra, 0, 0)
    assert field.defined.all()
    # Ground state of the constant-potential circulant operator is the
    # constant Fourier mode, so |psi|^2 is spatially uniform.
    squared = field.values ** 2
    assert np.allclose(squared, squared.mean(), rtol=1e-8)


def test_export_flags_missing_eigenpairs():
    pixels = random_image(91, 8, 8).pixels.copy()
    pixels[2, :] = 1.0  # strong row: extra bound states
    pixels[5, :] = 0.0  # empty row
    img = Image(pixels)
    spectra = decompose_image(img, ScsaParams(h=0.45, gamma=4.0))
    ranks = [d.count_negative for d in spectra.row_spectra]
    deep = max(ranks) - 1
    assert ranks[5] == 0 and ranks[2] >= deep + 1 > 1
    field = export_eigenfunction(spectra, deep, 0)
    assert not field.defined[5].any()
    # rows lacking eigenpair `deep` are flagged and zero
    for i, rank in enumerate(ranks):
        if rank <= deep:
            assert not field.defined[i].any()
            assert (field.values[i] == 0.0).all()
    assert field.defined[2].any()

    with pytest.raises(DataError):
        export_eigenfunction(spectra, max(ranks) + 50, 0)
    with pytest.raises(DataError):
        export_eigenfunction(spectra, -1, 0)


def test_export_ground_state_localizes_on_bright_regions(cam128):
    # Qualitative: ground-state energy should sit on the image's brightest
    # structures (each slice's deepest potential well).
    spectra = decompose_image(cam128, ScsaParams(h=1.5, gamma=4.0), workers=4)
    field = export_eigenfunction(spectra, 0, 0)
    energy = field.values ** 2
    hot = energy >= np.quantile(energy, 0.95)
    assert cam128.pixels[hot].mean() > cam128.pixels.mean()
