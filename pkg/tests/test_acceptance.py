"""End-to-end acceptance gate.

One test per criterion; each prints a single PASS line on success (run with
``pytest -s tests/test_acceptance.py`` to see them). Tolerances are pinned
here and nowhere else.
"""

import csv
import json
import math

import numpy as np
import pytest

from scsa import (
    GridSpec,
    NoiseSpec,
    ScsaParams,
    SchrodingerOperator1D,
    SweepSpec,
    add_noise,
    assemble_operator,
    build_diff_matrix,
    checkerboard,
    decompose_image,
    example1_image,
    negative_spectrum,
    reconstruct_2d,
    semiclassical_constant_1d,
    semiclassical_constant_2d,
    snr_db,
    sweep,
)
from scsa import imageio, metrics
from scsa.cli import main as cli_main

import oracles
from conftest import DATA_DIR, random_image

SEED = 20250811
WORKERS = 4


def _ok(number, message):
    print(f"ACCEPTANCE {number} PASS: {message}")


def test_criterion_01_constants():
    assert semiclassical_constant_1d(0.5) == 0.25  # exact
    for gamma in (0.0, 0.5, 1.0, 2.0, 4.0, 7.5, 11.0):
        r1 = semiclassical_constant_1d(gamma + 1.0) / semiclassical_constant_1d(gamma)
        assert abs(r1 - (gamma + 1.0) / (gamma + 1.5)) <= 1e-12 * r1
    for gamma in (0.5, 1.0, 2.0, 4.0, 7.5, 11.0):
        r2 = semiclassical_constant_2d(gamma) / semiclassical_constant_2d(gamma + 1.0)
        assert abs(r2 - (gamma + 2.0) / (gamma + 1.0)) <= 1e-12 * r2
    _ok(1, "1D constant exact at gamma=1/2; 1D/2D recurrences hold to 1e-12")


@pytest.mark.parametrize("n", [16, 64])
def test_criterion_02_spectral_oracle(n):
    delta = 2.0 * math.pi / n
    for h, c, half in [(1.0, 10.0, False), (0.5, 4.0, False), (1.0, 6.0, True)]:
        op = SchrodingerOperator1D(
            h=h, potential=np.full(n, c), diff=build_diff_matrix(n, delta), half_potential=half
        )
        matrix = assemble_operator(op)
        computed = np.sort(np.linalg.eigvalsh(matrix))
        expected = oracles.constant_potential_eigs(n, delta, h, c, half)
        scale = np.maximum(1.0, np.abs(expected))
        assert (np.abs(computed - expected) <= 1e-8 * scale).all()

        dec = negative_spectrum(op, lam=0.0)
        fro = np.linalg.norm(matrix)
        for k in range(dec.count_negative):
            v = dec.eigenvectors[:, k]
            mu = dec.eigenvalues[k]
            residual = np.linalg.norm(matrix @ v - mu * v) / (fro + abs(mu))
            assert residual <= 1e-10
    _ok(2, f"n={n}: eigenvalues match the Fourier symbol to 1e-8, residuals <= 1e-10")


def test_criterion_03_brute_force_equivalence():
    cases = [
        (101, 8, 8, 4.0, 0.0), (102, 9, 11, 4.0, 0.0), (103, 10, 10, 1.0, 0.0),
        (104, 11, 9, 2.0, -0.05), (105, 12, 12, 4.0, 0.0), (106, 13, 13, 3.0, 0.0),
        (107, 14, 10, 2.5, 0.0), (108, 15, 15, 4.0, 0.0), (109, 16, 16, 4.0, 0.0),
        (110, 16, 12, 1.0, -0.02),
    ]
    worst = 0.0
    for seed, rows, cols, gamma, lam in cases:
        img = random_image(seed, rows, cols)
        ours = reconstruct_2d(img, ScsaParams(h=0.35, gamma=gamma, lam=lam)).reconstructed.pixels
        naive = oracles.naive_reconstruct_2d(img.pixels, 0.35, gamma, lam, 1.0)
        worst = max(worst, float(np.abs(ours - naive).max()))
    assert worst <= 1e-10
    _ok(3, f"10 random images match the quadruple-loop oracle (worst {worst:.2e})")


def test_criterion_04_eigencount_monotonicity(cam128, example1_full):
    h_grid = [0.2, 0.35, 0.6, 1.0, 1.7, 2.9]
    for name, img in (("cam128", cam128), ("example1", example1_full)):
        params = [ScsaParams(h=h, gamma=4.0, delta=img.delta) for h in h_grid]
        previous = None
        for p in params:
            spectra = decompose_image(img, p, workers=WORKERS)
            counts = np.array(
                [d.count_negative for d in spectra.row_spectra + spectra.col_spectra]
            )
            if previous is not None:
                assert (counts <= previous).all(), f"{name}: counts grew from h={p.h}"
            previous = counts
    _ok(4, "per-slice counts non-increasing over ascending 6-point h grid on both images")


def test_criterion_05_reconstruction_convergence(example1_64):
    img = example1_64
    h_grid = np.geomspace(0.8, 0.0134, 8)  # descending, pinned
    mses, rels = [], []
    for h in h_grid:
        rec = reconstruct_2d(
            img, ScsaParams(h=float(h), gamma=4.0, delta=img.delta), workers=WORKERS
        ).reconstructed.pixels
        mses.append(float(np.mean((rec - img.pixels) ** 2)))
        rels.append(float(np.linalg.norm(rec - img.pixels) / np.linalg.norm(img.pixels)))
    floor = int(np.argmin(mses))
    for worse, better in zip(mses[:floor], mses[1 : floor + 1]):
        assert better <= worse * (1.0 + 1e-9)
    best_rel = min(rels)
    assert best_rel <= 0.05
    _ok(5, f"MSE non-increasing down to the floor; best relative L2 error {best_rel:.3%}")


def test_criterion_06_gamma_optimum(example1_64):
    img = example1_64
    spec = SweepSpec(
        h_values=np.geomspace(0.005, 0.5, 10),
        gamma_values=np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0]),
        objective="min-mse",
        reference=img,
    )
    result = sweep(img, spec, ScsaParams(h=0.1, gamma=4.0, delta=img.delta), workers=WORKERS)
    per_gamma = {}
    for cell in result.table:
        if cell.gamma not in per_gamma or cell.mse < per_gamma[cell.gamma]:
            per_gamma[cell.gamma] = cell.mse
    best_gamma = min(per_gamma, key=per_gamma.get)
    assert best_gamma in (3.0, 4.0, 5.0)
    _ok(6, f"per-gamma-best-h sweep selects gamma = {best_gamma:g} (4 +/- 1)")


@pytest.mark.parametrize("sigma", [20.0, 30.0, 50.0])
def test_criterion_07_denoising_efficacy(cam128, sigma):
    noisy = add_noise(cam128, NoiseSpec(sigma_255=sigma, seed=SEED))
    noisy_psnr = metrics.psnr(cam128.pixels, noisy.pixels)
    noisy_mssim = metrics.mssim(cam128.pixels, noisy.pixels)
    spec = SweepSpec(np.geomspace(0.4, 4.0, 7), np.array([4.0]), "max-psnr", cam128)
    result = sweep(noisy, spec, ScsaParams(h=0.4, gamma=4.0), workers=WORKERS)
    best = result.best_cell()
    assert best.psnr_db >= noisy_psnr + 2.0
    assert best.mssim > noisy_mssim
    _ok(
        7,
        f"sigma={sigma:g}: PSNR {noisy_psnr:.2f} -> {best.psnr_db:.2f} dB "
        f"(+{best.psnr_db - noisy_psnr:.2f}), MSSIM {noisy_mssim:.3f} -> {best.mssim:.3f}",
    )


@pytest.mark.parametrize("sigma,target", [(30.0, 12.58), (50.0, 8.27)])
def test_criterion_08_noise_anchor(sigma, target):
    board = checkerboard(128, 16, 0.25, 0.75)
    noisy = add_noise(board, NoiseSpec(sigma_255=sigma, seed=SEED, clip=False))
    value = snr_db(board, noisy)
    assert abs(value - target) <= 1.5
    _ok(8, f"sigma={sigma:g}: SNR {value:.2f} dB within 1.5 dB of {target}")


def test_criterion_09_metric_identities():
    img = random_image(201, 32, 32)
    assert abs(metrics.mssim(img, img) - 1.0) <= 1e-9
    shifted = np.clip(img.pixels + 0.07, 0.0, 1.0)
    err = metrics.mse(img.pixels, shifted)
    assert abs(metrics.psnr(img.pixels, shifted) - 10.0 * math.log10(1.0 / err)) <= 1e-9
    anchor = 10.0 * math.log10(1.0 / 0.0027)
    assert abs(anchor - 25.686) <= 1e-3
    b = np.full((10, 10), math.sqrt(0.0027))
    assert abs(metrics.psnr(np.zeros((10, 10)), b, 1.0) - 25.686) <= 1e-3
    _ok(9, "mssim identity, psnr/mse consistency, and the 25.686 dB anchor hold")


def test_criterion_10_determinism(tmp_path):
    board = tmp_path / "board.pgm"
    imageio.save(checkerboard(32, 8, 0.25, 0.75), board)
    for run in ("one", "two"):
        code = cli_main(
            [
                "denoise", str(board), "--sigma", "25", "--seed", str(SEED),
                "--out", str(tmp_path / run),
                "--h-min", "0.5", "--h-max", "2.0", "--h-steps", "3", "--threads", "2",
            ]
        )
        assert code == 0
    for name in ("report.json", "noisy.png", "denoised.png"):
        first = (tmp_path / "one" / name).read_bytes()
        second = (tmp_path / "two" / name).read_bytes()
        assert first == second, f"{name} differs between identical runs"
    tables = []
    for run in ("one", "two"):
        with open(tmp_path / run / "sweep.csv", newline="") as handle:
            tables.append([row[:-1] for row in csv.reader(handle)])  # drop wall_time_s
    assert tables[0] == tables[1]

    img = random_image(202, 16, 16)
    params = ScsaParams(h=0.3, gamma=4.0)
    a = reconstruct_2d(img, params).reconstructed.pixels
    b = reconstruct_2d(img, params, workers=WORKERS).reconstructed.pixels
    assert (a == b).all()
    _ok(10, "identical config + seed give byte-identical images/reports (CSV sans wall time)")
