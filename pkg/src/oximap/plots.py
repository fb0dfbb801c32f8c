"""Figure rendering for the CLI report paths.

Each report-writing subcommand can drop a PNG next to its delimited output:
side-by-side THb/SatO2 panels for map comparisons, the trace/derivative/
spectrum triptych for pulse analysis, and a throughput bar chart for
benchmarks. Uses the Agg backend so it works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .core import ConcentrationMap
from .metrics import MseReport
from .timeseries import PulseReport


def render_compare_figure(
    est: ConcentrationMap, ref: ConcentrationMap, report: MseReport, path
) -> None:
    """2x2 panel: estimated vs reference THb and SatO2, RMSE in the title."""
    fig, axes = plt.subplots(2, 2, figsize=(9, 7), constrained_layout=True)
    thb_max = max(np.nanmax(est.thb), np.nanmax(ref.thb), 1e-9)
    panels = [
        (axes[0, 0], est.thb, f"estimated THb (g/l)", dict(vmin=0, vmax=thb_max, cmap="inferno")),
        (axes[0, 1], ref.thb, "reference THb (g/l)", dict(vmin=0, vmax=thb_max, cmap="inferno")),
        (axes[1, 0], est.sat_o2, "estimated SatO2", dict(vmin=0, vmax=1, cmap="RdYlBu_r")),
        (axes[1, 1], ref.sat_o2, "reference SatO2", dict(vmin=0, vmax=1, cmap="RdYlBu_r")),
    ]
    for ax, plane, title, kwargs in panels:
        im = ax.imshow(plane, **kwargs)
        ax.set_title(title)
        ax.set_xticks([])
        ax.set_yticks([])
        fig.colorbar(im, ax=ax, shrink=0.8)
    fig.suptitle(f"RMSE {report.rmse:.3g} g/l over {report.n_pixels} px")
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_pulse_figure(report: PulseReport, band_hz: tuple[float, float], path) -> None:
    """Trace, smoothed derivative, and band power spectrum with the peak marked."""
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.4), constrained_layout=True)
    t = report.trace.times
    axes[0].plot(t, report.trace.values, lw=0.9)
    axes[0].set_xlabel("time (s)")
    axes[0].set_ylabel("patch-mean THb (g/l)")
    axes[0].set_title("THb trace")

    axes[1].plot(report.derivative.times, report.derivative.values, lw=0.9, color="tab:orange")
    axes[1].set_xlabel("time (s)")
    axes[1].set_ylabel("dTHb/dt (g/l/s)")
    axes[1].set_title("smoothed derivative")

    d = report.derivative
    x = d.values - d.values.mean()
    power = np.abs(np.fft.rfft(x * np.hanning(len(x)))) ** 2
    freqs = np.fft.rfftfreq(len(x), 1.0 / d.fps)
    sel = (freqs >= band_hz[0]) & (freqs <= band_hz[1])
    axes[2].plot(freqs[sel], power[sel], lw=1.0, color="tab:green")
    axes[2].axvline(report.peak_hz, color="k", ls="--", lw=0.8)
    axes[2].set_xlabel("frequency (Hz)")
    axes[2].set_ylabel("power")
    axes[2].set_title(
        f"peak {report.peak_hz:.2f} Hz ({report.bpm:.0f} bpm, frac {report.power_fraction:.2f})"
    )
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_bench_figure(rows: list[dict], path) -> None:
    """Horizontal bars of median frames/sec per benchmarked mode."""
    labels = [f"{r['method']} (levels={r['n_levels']})" for r in rows]
    fps = [r["frames_per_sec"] for r in rows]
    fig, ax = plt.subplots(figsize=(7, 0.7 * len(rows) + 1.6), constrained_layout=True)
    ax.barh(labels, fps, color="tab:blue")
    for i, v in enumerate(fps):
        ax.text(v, i, f" {v:.3g}", va="center")
    ax.set_xlabel("frames / s (median)")
    ax.set_title("throughput")
    fig.savefig(path, dpi=130)
    plt.close(fig)
