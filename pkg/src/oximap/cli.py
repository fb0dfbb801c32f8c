"""Command-line front end.

Subcommands: ``synth phantom``, ``synth pulse``, ``estimate``, ``reference``,
``compare``, ``pulse``, and ``bench``. Numeric knobs resolve with precedence
flags > config file (TOML, ``--config``) > built-in defaults, and every run
prints its effective configuration. Report-writing commands (compare, pulse,
bench) also render a PNG figure next to the CSV unless ``--no-fig`` is given.

Exit codes: 0 success, 2 argument error, 3 data/format error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import glob
import sys
import time
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import fixtures
from . import io as oio
from .bayes import BayesConfig
from .core import DEFAULT_GRID
from .errors import ArgumentError, DataError, NumericalError
from .metrics import concentration_mse
from .pipeline import PipelineConfig, estimate_frame
from .synth import (
    GaussianBlob,
    PhantomSpec,
    generate_phantom,
    pulse_sequence,
    tissue_phantom_spec,
)
from .timeseries import analyze_pulse

#: One place for every numeric default the CLI exposes.
DEFAULTS = {
    "levels": 1,
    "gamma": 1e-3,
    "beta": 0.1,
    "iters": 20,
    "tol": 1e-4,
    "epsilon": 1e-6,
    "threads": 1,
    "calibration_scale": 1.0,
    "exposure": 1.0,
    "fps": 25.0,
    "duration": 10.0,
    "hz": 1.25,
    "amplitude": 0.05,
    "noise": 0.0,
    "seed": 0,
    "band": (0.6, 3.0),
    "window": 0.4,
    "repeat": 5,
    "size": (128, 128),
    "background": (32.0, 28.0),
}

_MODE_NAMES = {"hybrid": "hybrid", "tikhonov": "tikhonov_only", "bayes": "bayes_only"}

REPORT_COLUMNS = [
    "method", "n_levels", "mse", "rmse", "mse_hbo", "mse_hb", "frames_per_sec",
]


def _load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except FileNotFoundError as exc:
        raise DataError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise DataError(f"malformed config {path}: {exc}") from exc


def _resolve(args, config: dict, key: str, cast=None):
    """Effective value for one knob: flag, else config file, else default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        value = config[key]
        return cast(value) if cast else value
    return DEFAULTS[key]


def _parse_pair(text: str, name: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ArgumentError(f"{name} must be two comma-separated numbers, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ArgumentError(f"bad {name}: {exc}") from exc


def _parse_size(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ArgumentError(f"size must be HxW, got {text!r}")
    try:
        h, w = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ArgumentError(f"bad size: {exc}") from exc
    return h, w


def _parse_rect(text: str) -> tuple[int, int, int, int]:
    parts = text.split(",")
    if len(parts) != 4:
        raise ArgumentError(f"rect must be x,y,w,h, got {text!r}")
    try:
        return tuple(int(p) for p in parts)  # type: ignore[return-value]
    except ValueError as exc:
        raise ArgumentError(f"bad rect: {exc}") from exc


def _expand_inputs(pattern: str) -> list[Path]:
    if any(ch in pattern for ch in "*?["):
        matches = sorted(glob.glob(pattern))
        if not matches:
            raise DataError(f"no files match {pattern!r}")
        return [Path(m) for m in matches]
    p = Path(pattern)
    if not p.exists():
        raise DataError(f"input file not found: {p}")
    return [p]


def _numbered(path: Path, index: int, many: bool) -> Path:
    if not many:
        return path
    return path.with_name(f"{path.stem}_{index:06d}{path.suffix}")


def _ensure_parent(path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _load_operators(args, grid=DEFAULT_GRID):
    if getattr(args, "sensitivity", None):
        sens = oio.load_sensitivity_csv(args.sensitivity, grid)
        sens_label = args.sensitivity
    else:
        sens = fixtures.default_sensitivity(grid)
        sens_label = "builtin"
    if getattr(args, "basis", None):
        basis = oio.load_chromophore_csv(args.basis, grid)
        basis_label = args.basis
    else:
        basis = fixtures.default_basis(grid)
        basis_label = "builtin"
    return sens, basis, sens_label, basis_label


def _pipeline_config(args, config) -> tuple[PipelineConfig, dict]:
    knobs = {k: _resolve(args, config, k) for k in (
        "levels", "gamma", "beta", "iters", "tol", "epsilon", "threads",
        "calibration_scale",
    )}
    mode = _MODE_NAMES.get(getattr(args, "mode", "hybrid") or "hybrid")
    if mode is None:
        raise ArgumentError(f"unknown mode {args.mode!r}")
    cfg = PipelineConfig(
        mode=mode,
        n_levels=int(knobs["levels"]),
        tikhonov_gamma=float(knobs["gamma"]),
        bayes=BayesConfig(
            beta=float(knobs["beta"]),
            max_iters=int(knobs["iters"]),
            rel_tol=float(knobs["tol"]),
            epsilon=float(knobs["epsilon"]),
        ),
        threads=int(knobs["threads"]),
        calibration_scale=float(knobs["calibration_scale"]),
    )
    return cfg, knobs


def _print_config(command: str, **kwargs) -> None:
    rendered = " ".join(f"{k}={v}" for k, v in kwargs.items())
    print(f"[{command}] config: {rendered}")


def _phantom_spec_from_args(args, config) -> PhantomSpec:
    seed = int(_resolve(args, config, "seed"))
    noise = float(_resolve(args, config, "noise"))
    if args.spec:
        raw = _load_config(args.spec)
        blobs = tuple(
            GaussianBlob(
                cx=float(b["cx"]), cy=float(b["cy"]), radius=float(b["radius"]),
                hbo=float(b["hbo"]), hb=float(b["hb"]),
            )
            for b in raw.get("blobs", [])
        )
        try:
            return PhantomSpec(
                height=int(raw["height"]),
                width=int(raw["width"]),
                background=tuple(raw.get("background", DEFAULTS["background"])),
                blobs=blobs,
                illumination_offset=float(raw.get("illumination_offset", 0.0)),
                noise_sigma=float(raw.get("noise_sigma", noise)),
                seed=int(raw.get("seed", seed)),
            )
        except KeyError as exc:
            raise DataError(f"phantom spec is missing field {exc}") from exc
    size = _parse_size(args.size) if args.size else DEFAULTS["size"]
    background = (
        _parse_pair(args.background, "background")
        if args.background else DEFAULTS["background"]
    )
    if args.preset == "tissue":
        return tissue_phantom_spec(
            size[0], size[1], seed=seed, noise_sigma=noise, background=background
        )
    blobs = tuple(
        GaussianBlob(
            cx=float(v[0]), cy=float(v[1]), radius=float(v[2]),
            hbo=float(v[3]), hb=float(v[4]),
        )
        for v in (b.split(",") for b in args.blob or [])
    )
    return PhantomSpec(
        height=size[0], width=size[1], background=background, blobs=blobs,
        illumination_offset=args.illumination or 0.0, noise_sigma=noise, seed=seed,
    )


def _figure_path(args, report_path: str) -> Path | None:
    if args.no_fig:
        return None
    if args.fig:
        return _ensure_parent(args.fig)
    return _ensure_parent(Path(report_path).with_suffix(".png"))


def _write_report_csv(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=REPORT_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in REPORT_COLUMNS})


# ---------------------------------------------------------------- commands


def cmd_synth_phantom(args) -> int:
    config = _load_config(args.config)
    spec = _phantom_spec_from_args(args, config)
    exposure = float(_resolve(args, config, "exposure"))
    sens, basis, sens_label, basis_label = _load_operators(args)
    _print_config(
        "synth phantom", height=spec.height, width=spec.width,
        background=spec.background, blobs=len(spec.blobs), noise=spec.noise_sigma,
        seed=spec.seed, exposure=exposure, preset=args.preset or "none",
        sensitivity=sens_label, basis=basis_label,
    )
    truth, cube, rgb = generate_phantom(spec, sens, basis, exposure)
    if not (args.out_cube or args.out_truth or args.out_rgb):
        raise ArgumentError("give at least one of --out-cube/--out-truth/--out-rgb")
    if args.out_cube:
        oio.write_spc(_ensure_parent(args.out_cube), cube)
        print(f"wrote {args.out_cube}")
    if args.out_truth:
        oio.write_map_spc(_ensure_parent(args.out_truth), truth)
        print(f"wrote {args.out_truth}")
    if args.out_rgb:
        oio.write_ppm(_ensure_parent(args.out_rgb), rgb)
        print(f"wrote {args.out_rgb}")
    return 0


def cmd_synth_pulse(args) -> int:
    config = _load_config(args.config)
    spec = _phantom_spec_from_args(args, config)
    fps = float(_resolve(args, config, "fps"))
    duration = float(_resolve(args, config, "duration"))
    hz = float(_resolve(args, config, "hz"))
    amplitude = float(_resolve(args, config, "amplitude"))
    exposure = float(_resolve(args, config, "exposure"))
    sens, basis, sens_label, basis_label = _load_operators(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _print_config(
        "synth pulse", fps=fps, duration=duration, hz=hz, amplitude=amplitude,
        height=spec.height, width=spec.width, noise=spec.noise_sigma,
        seed=spec.seed, exposure=exposure, out_dir=out_dir,
        sensitivity=sens_label, basis=basis_label,
    )
    n = 0
    for i, frame in enumerate(
        pulse_sequence(spec, fps, duration, hz, amplitude, sens, basis, exposure)
    ):
        oio.write_ppm(out_dir / f"frame_{i:06d}.ppm", frame)
        n += 1
    print(f"wrote {n} frames to {out_dir}")
    return 0


def cmd_estimate(args) -> int:
    config = _load_config(args.config)
    cfg, knobs = _pipeline_config(args, config)
    sens, basis, sens_label, basis_label = _load_operators(args)
    _print_config(
        "estimate", mode=cfg.mode, levels=cfg.n_levels, gamma=cfg.tikhonov_gamma,
        beta=cfg.bayes.beta, iters=cfg.bayes.max_iters, tol=cfg.bayes.rel_tol,
        epsilon=cfg.bayes.epsilon, threads=cfg.threads,
        calibration_scale=cfg.calibration_scale,
        sensitivity=sens_label, basis=basis_label,
    )
    inputs = _expand_inputs(args.inputs)
    many = len(inputs) > 1
    for i, path in enumerate(inputs):
        frame = oio.read_ppm(path)
        cube, cmap = estimate_frame(frame, sens, basis, cfg)
        out_map = _ensure_parent(_numbered(Path(args.out_map), i, many))
        oio.write_map_spc(out_map, cmap)
        print(f"{path} -> {out_map}")
        if args.out_cube:
            out_cube = _ensure_parent(_numbered(Path(args.out_cube), i, many))
            oio.write_spc(out_cube, cube)
            print(f"{path} -> {out_cube}")
    return 0


def cmd_reference(args) -> int:
    config = _load_config(args.config)
    epsilon = float(_resolve(args, config, "epsilon"))
    calibration = float(_resolve(args, config, "calibration_scale"))
    threads = int(_resolve(args, config, "threads"))
    sens, basis, sens_label, basis_label = _load_operators(args)
    _print_config(
        "reference", epsilon=epsilon, calibration_scale=calibration,
        threads=threads, basis=basis_label,
    )
    cube = oio.read_spc(args.in_cube, expect_grid=basis.grid)
    cfg = PipelineConfig(
        mode="direct_msi",
        bayes=BayesConfig(epsilon=epsilon),
        calibration_scale=calibration,
        threads=threads,
    )
    _, cmap = estimate_frame(cube, sens, basis, cfg)
    oio.write_map_spc(_ensure_parent(args.out_map), cmap)
    print(f"wrote {args.out_map}")
    return 0


def cmd_compare(args) -> int:
    est = oio.read_map_spc(args.est)
    ref = oio.read_map_spc(args.ref)
    mask = None
    if args.mask:
        mask_img = oio.read_ppm(args.mask)
        mask = np.any(mask_img.data > 0, axis=2)
    report = concentration_mse(est, ref, mask)
    method = args.method or Path(args.est).stem
    _print_config("compare", est=args.est, ref=args.ref, mask=args.mask or "none", method=method)
    row = dict(
        method=method, n_levels=args.levels if args.levels is not None else "",
        mse=f"{report.mse:.10g}", rmse=f"{report.rmse:.10g}",
        mse_hbo=f"{report.mse_hbo:.10g}", mse_hb=f"{report.mse_hb:.10g}",
    )
    _write_report_csv(_ensure_parent(args.report), [row])
    print(
        f"rmse={report.rmse:.6g} g/l (mse={report.mse:.6g}, hbo={report.mse_hbo:.6g}, "
        f"hb={report.mse_hb:.6g}, pixels={report.n_pixels})"
    )
    print(f"wrote {args.report}")
    fig_path = _figure_path(args, args.report)
    if fig_path is not None:
        from . import plots

        plots.render_compare_figure(est, ref, report, fig_path)
        print(f"wrote {fig_path}")
    return 0


def cmd_pulse(args) -> int:
    config = _load_config(args.config)
    fps = float(_resolve(args, config, "fps"))
    window = float(_resolve(args, config, "window"))
    band = _parse_pair(args.band, "band") if args.band else DEFAULTS["band"]
    rect = _parse_rect(args.rect)
    paths = _expand_inputs(args.maps)
    maps = (oio.read_map_spc(p) for p in paths)
    _print_config(
        "pulse", maps=len(paths), rect=rect, fps=fps, band=band, window=window
    )
    report = analyze_pulse(maps, rect, fps, band, window)
    oio.write_trace_csv(_ensure_parent(args.out), report.trace)
    print(f"peak_hz={report.peak_hz:.4f}")
    print(f"power_fraction={report.power_fraction:.4f}")
    print(f"bpm={report.bpm:.2f}")
    print(f"wrote {args.out}")
    fig_path = _figure_path(args, args.out)
    if fig_path is not None:
        from . import plots

        plots.render_pulse_figure(report, band, fig_path)
        print(f"wrote {fig_path}")
    return 0


def cmd_bench(args) -> int:
    config = _load_config(args.config)
    repeat = int(_resolve(args, config, "repeat"))
    if repeat < 1:
        raise ArgumentError(f"repeat must be >= 1, got {repeat}")
    sens, basis, sens_label, basis_label = _load_operators(args)
    frames = [oio.read_ppm(p) for p in _expand_inputs(args.inputs)]
    mode_specs = []
    for token in args.modes.split(","):
        name, _, levels = token.partition(":")
        if name not in _MODE_NAMES:
            raise ArgumentError(f"unknown bench mode {name!r} in {args.modes!r}")
        mode_specs.append((name, int(levels) if levels else 1))
    _print_config(
        "bench", frames=len(frames), modes=args.modes, repeat=repeat,
        sensitivity=sens_label, basis=basis_label,
    )
    base_args = argparse.Namespace(**vars(args))
    rows = []
    for name, levels in mode_specs:
        base_args.mode = name
        base_args.levels = levels
        cfg, _ = _pipeline_config(base_args, config)
        seconds = []
        for _ in range(repeat):
            t0 = time.perf_counter()
            for frame in frames:
                estimate_frame(frame, sens, basis, cfg)
            seconds.append(time.perf_counter() - t0)
        med = float(np.median(seconds))
        fps = len(frames) / med if med > 0 else float("inf")
        rows.append(dict(
            method=name, n_levels=levels, frames_per_sec=fps,
        ))
        print(f"{name}:{levels}  median {med:.4f}s for {len(frames)} frames  -> {fps:.3f} fps")
    csv_rows = [
        dict(method=r["method"], n_levels=r["n_levels"],
             frames_per_sec=f"{r['frames_per_sec']:.6g}")
        for r in rows
    ]
    _write_report_csv(_ensure_parent(args.report), csv_rows)
    print(f"wrote {args.report}")
    fig_path = _figure_path(args, args.report)
    if fig_path is not None:
        from . import plots

        plots.render_bench_figure(rows, fig_path)
        print(f"wrote {fig_path}")
    return 0


# ---------------------------------------------------------------- parser


def _add_operator_flags(p):
    p.add_argument("--sensitivity", help="camera sensitivity CSV (default: builtin table)")
    p.add_argument("--basis", help="chromophore attenuation CSV (default: builtin table)")


def _add_fig_flags(p):
    p.add_argument("--fig", help="figure path (default: report path with .png)")
    p.add_argument("--no-fig", action="store_true", help="skip figure rendering")


def _add_phantom_flags(p):
    p.add_argument("--spec", help="phantom description TOML")
    p.add_argument("--preset", choices=["flat", "tissue"], default="flat",
                   help="phantom composition when no --spec is given")
    p.add_argument("--size", help=f"HxW (default {DEFAULTS['size'][0]}x{DEFAULTS['size'][1]})")
    p.add_argument("--background", help="hbo,hb g/litre")
    p.add_argument("--blob", action="append", help="cx,cy,radius,hbo,hb (repeatable)")
    p.add_argument("--illumination", type=float, help="constant illumination offset")
    p.add_argument("--seed", type=int, help=f"rng seed (default {DEFAULTS['seed']})")
    p.add_argument("--noise", type=float,
                   help=f"reflectance noise sigma (default {DEFAULTS['noise']})")
    p.add_argument("--exposure", type=float,
                   help=f"RGB synthesis exposure (default {DEFAULTS['exposure']})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oximap",
        description="Haemoglobin concentration and SatO2 maps from RGB frames",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="generate phantoms and pulse sequences")
    synth_sub = synth.add_subparsers(dest="synth_command", required=True)

    sp = synth_sub.add_parser("phantom", help="one phantom: truth map, cube, RGB view")
    _add_phantom_flags(sp)
    _add_operator_flags(sp)
    sp.add_argument("--config", help="TOML with default knobs")
    sp.add_argument("--out-cube", help="SPC1 reflectance cube output")
    sp.add_argument("--out-truth", help="SPC1 truth concentration map output")
    sp.add_argument("--out-rgb", help="16-bit pixmap output")
    sp.set_defaults(func=cmd_synth_phantom)

    pl = synth_sub.add_parser("pulse", help="pulsatile frame sequence as pixmaps")
    _add_phantom_flags(pl)
    _add_operator_flags(pl)
    pl.add_argument("--config", help="TOML with default knobs")
    pl.add_argument("--fps", type=float, help=f"frames per second (default {DEFAULTS['fps']})")
    pl.add_argument("--duration", type=float, help=f"seconds (default {DEFAULTS['duration']})")
    pl.add_argument("--hz", type=float, help=f"pulse rate (default {DEFAULTS['hz']})")
    pl.add_argument("--amplitude", type=float,
                    help=f"THb modulation fraction (default {DEFAULTS['amplitude']})")
    pl.add_argument("--out-dir", required=True, help="directory for frame_NNNNNN.ppm")
    pl.set_defaults(func=cmd_synth_pulse)

    est = sub.add_parser("estimate", help="estimate maps from RGB pixmaps")
    est.add_argument("--in", dest="inputs", required=True, help="pixmap path or glob")
    _add_operator_flags(est)
    est.add_argument("--mode", choices=sorted(_MODE_NAMES), default="hybrid")
    est.add_argument("--levels", type=int, help=f"decomposition levels (default {DEFAULTS['levels']})")
    est.add_argument("--gamma", type=float,
                     help=f"relative Tikhonov strength (default {DEFAULTS['gamma']})")
    est.add_argument("--beta", type=float,
                     help=f"shape prior weight (default {DEFAULTS['beta']})")
    est.add_argument("--iters", type=int,
                     help=f"max estimator iterations (default {DEFAULTS['iters']})")
    est.add_argument("--tol", type=float,
                     help=f"relative convergence tolerance (default {DEFAULTS['tol']})")
    est.add_argument("--epsilon", type=float,
                     help=f"spectrum floor before logs (default {DEFAULTS['epsilon']})")
    est.add_argument("--threads", type=int, help=f"worker threads (default {DEFAULTS['threads']})")
    est.add_argument("--calibration-scale", dest="calibration_scale", type=float,
                     help=f"reported g/litre scale (default {DEFAULTS['calibration_scale']})")
    est.add_argument("--config", help="TOML with default knobs")
    est.add_argument("--out-map", required=True, help="SPC1 map output (numbered for globs)")
    est.add_argument("--out-cube", help="optional SPC1 estimated-cube output")
    est.set_defaults(func=cmd_estimate)

    ref = sub.add_parser("reference", help="fit concentrations directly from a cube")
    ref.add_argument("--in-cube", dest="in_cube", required=True, help="SPC1 cube input")
    _add_operator_flags(ref)
    ref.add_argument("--epsilon", type=float,
                     help=f"spectrum floor before logs (default {DEFAULTS['epsilon']})")
    ref.add_argument("--threads", type=int, help=f"worker threads (default {DEFAULTS['threads']})")
    ref.add_argument("--calibration-scale", dest="calibration_scale", type=float,
                     help=f"reported g/litre scale (default {DEFAULTS['calibration_scale']})")
    ref.add_argument("--config", help="TOML with default knobs")
    ref.add_argument("--out-map", required=True, help="SPC1 map output")
    ref.set_defaults(func=cmd_reference)

    cmp_ = sub.add_parser("compare", help="error metrics between two maps")
    cmp_.add_argument("--est", required=True, help="estimated map (SPC1)")
    cmp_.add_argument("--ref", required=True, help="reference map (SPC1)")
    cmp_.add_argument("--mask", help="pixmap mask: pixels with any positive channel count")
    cmp_.add_argument("--method", help="method label for the report row")
    cmp_.add_argument("--levels", type=int, help="levels label for the report row")
    cmp_.add_argument("--report", required=True, help="CSV report output")
    _add_fig_flags(cmp_)
    cmp_.set_defaults(func=cmd_compare)

    pls = sub.add_parser("pulse", help="pulse-rate analysis over a map sequence")
    pls.add_argument("--maps", required=True, help="SPC1 map glob")
    pls.add_argument("--rect", required=True, help="x,y,w,h patch")
    pls.add_argument("--fps", type=float, help=f"frames per second (default {DEFAULTS['fps']})")
    pls.add_argument("--band", help="lo,hi Hz analysis band (default 0.6,3.0)")
    pls.add_argument("--window", type=float,
                     help=f"smoothing window seconds (default {DEFAULTS['window']})")
    pls.add_argument("--config", help="TOML with default knobs")
    pls.add_argument("--out", required=True, help="trace CSV output")
    _add_fig_flags(pls)
    pls.set_defaults(func=cmd_pulse)

    ben = sub.add_parser("bench", help="throughput benchmark over modes")
    ben.add_argument("--in", dest="inputs", required=True, help="pixmap path or glob")
    _add_operator_flags(ben)
    ben.add_argument("--modes", default="hybrid:1,hybrid:3,tikhonov:1,bayes:1",
                     help="comma list of mode[:levels]")
    ben.add_argument("--repeat", type=int, help=f"repeats, median taken (default {DEFAULTS['repeat']})")
    ben.add_argument("--gamma", type=float, help="relative Tikhonov strength")
    ben.add_argument("--beta", type=float, help="shape prior weight")
    ben.add_argument("--iters", type=int, help="max estimator iterations")
    ben.add_argument("--tol", type=float, help="relative convergence tolerance")
    ben.add_argument("--epsilon", type=float, help="spectrum floor before logs")
    ben.add_argument("--threads", type=int, help="worker threads")
    ben.add_argument("--calibration-scale", dest="calibration_scale", type=float)
    ben.add_argument("--config", help="TOML with default knobs")
    ben.add_argument("--report", required=True, help="CSV report output")
    _add_fig_flags(ben)
    ben.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
