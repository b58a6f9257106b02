"""Command-line interface wiring the modules into reproducible experiments.

Every run writes a machine-readable JSON report embedding all parameters,
seeds and the software version. Reports contain no timestamps, so identical
configurations produce byte-identical outputs; the only nondeterministic
column is ``wall_time_s`` in sweep CSV tables.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, imageio, metrics, noise, synth, tuning
from .errors import DataError, NumericalError
from .scsa1d import ScsaParams
from .scsa2d import Image, reconstruct_2d
from .synth import GridSpec

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

REPORT_SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# report plumbing

def _sanitize(obj):
    """JSON-safe copy: numpy scalars/arrays unwrapped, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
    return obj


def _report_payload(command: str, body: dict) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "generator": {"name": "scsa", "version": __version__},
        "command": command,
        **body,
    }


def write_report(path, payload: dict) -> None:
    text = json.dumps(_sanitize(payload), indent=2, sort_keys=True) + "\n"
    Path(path).write_text(text, encoding="ascii")


def _metric_dict(bundle: metrics.MetricBundle) -> dict:
    return {
        "mse": bundle.mse,
        "psnr_db": bundle.psnr_db,
        "mssim": bundle.mssim,
        "intensity_scale": bundle.intensity_scale,
    }


# ---------------------------------------------------------------------------
# config file + argument resolution

def load_config(path) -> dict:
    """Key-value config: one ``key = value`` per line, '#' comments, keys match flag names."""
    values = {}
    for lineno, raw_line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip() or not value.strip():
            raise DataError(f"{path}:{lineno}: expected 'key = value', got {raw_line!r}")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


class _Resolver:
    """Flag > config file > built-in default, with usage errors for missing values."""

    def __init__(self, args, parser):
        self.args = args
        self.parser = parser
        self.config = load_config(args.config) if getattr(args, "config", None) else {}

    def get(self, name, default=None, cast=float, required=False):
        attr = name.replace("-", "_")
        if attr == "lambda":  # argparse dest avoids the keyword
            attr = "lambda_"
        value = getattr(self.args, attr, None)
        if value is None:
            raw = self.config.get(name.replace("-", "_"))
            if raw is not None:
                try:
                    value = cast(raw)
                except ValueError as exc:
                    raise DataError(f"config value for {name}: {exc}") from exc
        if value is None:
            value = default
        if value is None and required:
            self.parser.error(f"missing required option --{name}")
        return value


def _h_grid(resolver, default_min, default_max, default_steps) -> np.ndarray:
    h_min = resolver.get("h-min", default_min)
    h_max = resolver.get("h-max", default_max)
    steps = resolver.get("h-steps", default_steps, cast=int)
    if h_min <= 0 or h_max < h_min or steps < 1:
        raise DataError(f"bad h grid: min={h_min} max={h_max} steps={steps}")
    if steps == 1:
        return np.array([h_min])
    return np.geomspace(h_min, h_max, steps)


def _parse_gammas(text: str) -> np.ndarray:
    try:
        values = np.array([float(part) for part in text.split(",") if part.strip()])
    except ValueError as exc:
        raise DataError(f"bad gamma list {text!r}: {exc}") from exc
    if values.size == 0:
        raise DataError(f"bad gamma list {text!r}")
    return values


def _save_image(img: Image, path, fmt: str | None):
    imageio.save(img, path, format=fmt)


# ---------------------------------------------------------------------------
# subcommands

def _cmd_synth(args, parser) -> int:
    resolver = _Resolver(args, parser)
    out = resolver.get("out", cast=str, required=True)
    fmt = resolver.get("format", cast=str)
    if args.kind == "example1":
        grid = GridSpec(
            x_min=resolver.get("x-min", -1.0),
            x_max=resolver.get("x-max", 3.0),
            y_min=resolver.get("y-min", -1.0),
            y_max=resolver.get("y-max", 3.0),
            ts=resolver.get("ts", 0.02),
        )
        img = synth.example1_image(grid)
        body = {
            "kind": "example1",
            "grid": {
                "x_min": grid.x_min, "x_max": grid.x_max,
                "y_min": grid.y_min, "y_max": grid.y_max, "ts": grid.ts,
            },
            "shape": [img.rows, img.cols],
            "value_scale": img.value_scale,
        }
    else:
        n = resolver.get("n", 128, cast=int)
        img = synth.checkerboard(
            n=n,
            cell=resolver.get("cell", max(1, n // 8), cast=int),
            low=resolver.get("low", 0.25),
            high=resolver.get("high", 0.75),
        )
        body = {"kind": "checkerboard", "shape": [img.rows, img.cols]}
    _save_image(img, out, fmt)
    write_report(Path(out).with_suffix(".json"), _report_payload("synth", body))
    print(f"wrote {out} ({img.rows}x{img.cols})")
    return EXIT_OK


def _cmd_reconstruct(args, parser) -> int:
    resolver = _Resolver(args, parser)
    out = resolver.get("out", cast=str, required=True)
    params = ScsaParams(
        h=resolver.get("h", required=True),
        gamma=resolver.get("gamma", 4.0),
        lam=resolver.get("lambda", 0.0),
        delta=resolver.get("delta", 1.0),
    )
    img = imageio.load(args.input)
    if params.delta != 1.0:
        img = Image(img.pixels, delta=params.delta, intensity_scale=img.intensity_scale)
    report = reconstruct_2d(img, params, workers=resolver.get("threads", os.cpu_count(), cast=int))
    clamped = np.clip(report.reconstructed.pixels, 0.0, 1.0)
    bundle = metrics.compare(img.pixels, clamped)
    _save_image(Image(clamped, delta=img.delta), out, resolver.get("format", cast=str))
    body = {
        "input": str(args.input),
        "output": Path(out).name,
        "params": {"h": params.h, "gamma": params.gamma, "lambda": params.lam, "delta": params.delta},
        "neg_counts_rows": report.neg_counts_rows,
        "neg_counts_cols": report.neg_counts_cols,
        "empty_row_count": report.empty_row_count,
        "empty_col_count": report.empty_col_count,
        "metrics_vs_input": _metric_dict(bundle),
    }
    report_path = resolver.get("report", str(Path(out).with_suffix(".report.json")), cast=str)
    write_report(report_path, _report_payload("reconstruct", body))
    print(f"reconstructed {args.input} -> {out} (PSNR vs input {bundle.psnr_db:.2f} dB)")
    return EXIT_OK


def _cmd_denoise(args, parser) -> int:
    resolver = _Resolver(args, parser)
    out_dir = Path(resolver.get("out", cast=str, required=True))
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = resolver.get("format", "png", cast=str)
    suffix = ".png" if fmt == "png" else ".pgm"
    sigma = resolver.get("sigma", required=True)
    seed = resolver.get("seed", 0, cast=int)
    gamma = resolver.get("gamma", 4.0)
    lam = resolver.get("lambda", 0.0)
    workers = resolver.get("threads", os.cpu_count(), cast=int)
    h_values = _h_grid(resolver, 0.4, 4.0, 7)

    clean = imageio.load(args.clean)
    spec = noise.NoiseSpec(sigma_255=sigma, seed=seed, clip=True)
    noisy = noise.add_noise(clean, spec)
    noisy_path = out_dir / f"noisy{suffix}"
    _save_image(noisy, noisy_path, fmt)

    sweep_spec = tuning.SweepSpec(
        h_values=h_values,
        gamma_values=np.array([gamma]),
        objective="max-psnr",
        reference=clean,
    )
    params = ScsaParams(h=float(h_values[0]), gamma=gamma, lam=lam, delta=1.0)
    result = tuning.sweep(noisy, sweep_spec, params, workers=workers)
    tuning.write_csv(result, out_dir / "sweep.csv")

    best_cell = result.best_cell()
    best_report = reconstruct_2d(noisy, replace(params, h=best_cell.h), workers=workers)
    denoised = np.clip(best_report.reconstructed.pixels, 0.0, 1.0)
    denoised_path = out_dir / f"denoised{suffix}"
    _save_image(Image(denoised), denoised_path, fmt)

    noisy_bundle = metrics.compare(clean.pixels, noisy.pixels)
    body = {
        "clean": str(args.clean),
        # names relative to the report, so identical configs give identical bytes
        "outputs": {"noisy": noisy_path.name, "denoised": denoised_path.name, "table": "sweep.csv"},
        "noise": {
            "sigma_255": sigma,
            "seed": seed,
            "clip": True,
            "prng": noise.PRNG_NAME,
            "numpy_version": np.__version__,
            "snr_db": noise.snr_db(clean, noisy),
        },
        "params": {"gamma": gamma, "lambda": lam, "h_grid": h_values},
        "noisy_metrics": _metric_dict(noisy_bundle),
        "best": {
            "h": best_cell.h,
            "gamma": best_cell.gamma,
            "metrics": {"mse": best_cell.mse, "psnr_db": best_cell.psnr_db, "mssim": best_cell.mssim},
        },
    }
    write_report(out_dir / "report.json", _report_payload("denoise", body))
    print(
        f"denoised {args.clean}: noisy PSNR {noisy_bundle.psnr_db:.2f} dB -> "
        f"best PSNR {best_cell.psnr_db:.2f} dB at h={best_cell.h:.4g}"
    )
    return EXIT_OK


def _cmd_sweep(args, parser) -> int:
    resolver = _Resolver(args, parser)
    out_dir = Path(resolver.get("out", cast=str, required=True))
    out_dir.mkdir(parents=True, exist_ok=True)
    img = imageio.load(args.input)
    reference = imageio.load(args.reference) if args.reference else img
    delta = resolver.get("delta", 1.0)
    if delta != 1.0:
        img = Image(img.pixels, delta=delta, intensity_scale=img.intensity_scale)
        reference = Image(reference.pixels, delta=delta, intensity_scale=reference.intensity_scale)
    gammas = _parse_gammas(resolver.get("gammas", "4", cast=str))
    spec = tuning.SweepSpec(
        h_values=_h_grid(resolver, 0.05, 2.0, 8),
        gamma_values=gammas,
        objective=resolver.get("objective", "min-mse", cast=str),
        reference=reference,
    )
    params = ScsaParams(h=float(spec.h_values[0]), gamma=float(gammas[0]), lam=resolver.get("lambda", 0.0), delta=delta)
    result = tuning.sweep(img, spec, params, workers=resolver.get("threads", os.cpu_count(), cast=int))
    tuning.write_csv(result, out_dir / "sweep.csv")
    best = result.best_cell()
    body = {
        "input": str(args.input),
        "reference": str(args.reference) if args.reference else str(args.input),
        "objective": spec.objective,
        "h_grid": spec.h_values,
        "gamma_grid": spec.gamma_values,
        "best": {
            "h": best.h,
            "gamma": best.gamma,
            "metrics": {"mse": best.mse, "psnr_db": best.psnr_db, "mssim": best.mssim},
        },
    }
    write_report(out_dir / "report.json", _report_payload("sweep", body))
    print(f"sweep best ({spec.objective}): h={best.h:.4g} gamma={best.gamma:g} mse={best.mse:.4e}")
    return EXIT_OK


def _cmd_metrics(args, parser) -> int:
    resolver = _Resolver(args, parser)
    img_a = imageio.load(args.a)
    img_b = imageio.load(args.b)
    bundle = metrics.compare(img_a, img_b)
    payload = _report_payload(
        "metrics", {"a": str(args.a), "b": str(args.b), "metrics": _metric_dict(bundle)}
    )
    out = resolver.get("out", cast=str)
    if out:
        write_report(out, payload)
    print(json.dumps(_sanitize(payload), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_eigreport(args, parser) -> int:
    resolver = _Resolver(args, parser)
    out = resolver.get("out", cast=str, required=True)
    img = imageio.load(args.input)
    lam = resolver.get("lambda", 0.0)
    workers = resolver.get("threads", os.cpu_count(), cast=int)
    h_values = _h_grid(resolver, 0.25, 2.0, 4)
    from .scsa2d import decompose_image  # local import keeps module load light

    lines = ["h,axis,index,neg_count\n"]
    for h in (float(value) for value in h_values):
        spectra = decompose_image(img, ScsaParams(h=h, gamma=4.0, lam=lam), workers=workers)
        for i, dec in enumerate(spectra.row_spectra):
            lines.append(f"{h!r},row,{i},{dec.count_negative}\n")
        for j, dec in enumerate(spectra.col_spectra):
            lines.append(f"{h!r},col,{j},{dec.count_negative}\n")
    Path(out).write_text("".join(lines), encoding="ascii")
    print(f"wrote {out} ({len(lines) - 1} rows)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _add_common(sub):
    sub.add_argument("--config", help="key=value file supplying any flag (flags win)")
    sub.add_argument("--threads", type=int, default=None, help="worker threads (default: cores)")
    sub.add_argument("--format", choices=imageio.FORMATS, default=None, help="output image format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scsa",
        description="Reconstruct and denoise signals/images from Schrodinger-operator spectra.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("synth", help="generate a synthetic test image")
    sub.add_argument("kind", choices=("example1", "checkerboard"))
    sub.add_argument("--out", default=None, help="output image path")
    for flag in ("--x-min", "--x-max", "--y-min", "--y-max", "--ts", "--low", "--high"):
        sub.add_argument(flag, type=float, default=None)
    for flag in ("--n", "--cell"):
        sub.add_argument(flag, type=int, default=None)
    _add_common(sub)
    sub.set_defaults(func=_cmd_synth)

    sub = commands.add_parser("reconstruct", help="reconstruct one image at fixed parameters")
    sub.add_argument("input")
    sub.add_argument("--h", type=float, default=None, help="semi-classical parameter")
    sub.add_argument("--gamma", type=float, default=None)
    sub.add_argument("--lambda", dest="lambda_", type=float, default=None)
    sub.add_argument("--delta", type=float, default=None, help="pixel spacing (default 1)")
    sub.add_argument("--out", default=None, help="output image path")
    sub.add_argument("--report", default=None, help="report JSON path")
    _add_common(sub)
    sub.set_defaults(func=_cmd_reconstruct)

    sub = commands.add_parser("denoise", help="add seeded noise, sweep h, keep the best denoising")
    sub.add_argument("clean", help="clean input image")
    sub.add_argument("--sigma", type=float, default=None, help="noise std on the 0-255 scale")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--gamma", type=float, default=None)
    sub.add_argument("--lambda", dest="lambda_", type=float, default=None)
    sub.add_argument("--h-min", type=float, default=None)
    sub.add_argument("--h-max", type=float, default=None)
    sub.add_argument("--h-steps", type=int, default=None, help="log-spaced grid size")
    sub.add_argument("--out", default=None, help="output directory")
    _add_common(sub)
    sub.set_defaults(func=_cmd_denoise)

    sub = commands.add_parser("sweep", help="grid search (h, gamma) against a reference")
    sub.add_argument("input")
    sub.add_argument("--reference", default=None, help="clean reference (default: input itself)")
    sub.add_argument("--objective", choices=tuning.OBJECTIVES, default=None)
    sub.add_argument("--gammas", default=None, help="comma-separated gamma grid")
    sub.add_argument("--lambda", dest="lambda_", type=float, default=None)
    sub.add_argument("--delta", type=float, default=None)
    sub.add_argument("--h-min", type=float, default=None)
    sub.add_argument("--h-max", type=float, default=None)
    sub.add_argument("--h-steps", type=int, default=None)
    sub.add_argument("--out", default=None, help="output directory")
    _add_common(sub)
    sub.set_defaults(func=_cmd_sweep)

    sub = commands.add_parser("metrics", help="MSE / PSNR / MSSIM between two images")
    sub.add_argument("a")
    sub.add_argument("b")
    sub.add_argument("--out", default=None, help="optional report JSON path")
    _add_common(sub)
    sub.set_defaults(func=_cmd_metrics)

    sub = commands.add_parser("eigreport", help="per-slice negative-eigenvalue counts over an h grid")
    sub.add_argument("input")
    sub.add_argument("--lambda", dest="lambda_", type=float, default=None)
    sub.add_argument("--h-min", type=float, default=None)
    sub.add_argument("--h-max", type=float, default=None)
    sub.add_argument("--h-steps", type=int, default=None)
    sub.add_argument("--out", default=None, help="output CSV path")
    _add_common(sub)
    sub.set_defaults(func=_cmd_eigreport)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except FileNotFoundError as exc:
        print(f"scsa: error: file not found: {exc.filename or exc}", file=sys.stderr)
        return EXIT_DATA
    except (DataError, OSError) as exc:
        print(f"scsa: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"scsa: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
