"""Patch-mean trace extraction and pulse-rate spectral analysis.

The analysis chain mirrors how a pulse shows up in estimated total
haemoglobin: average a tissue patch per frame, smooth and differentiate the
trace, then locate the dominant band-limited spectral peak with sub-bin
quadratic interpolation of the log power through the peak bin.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.ndimage import uniform_filter1d

from .core import ConcentrationMap
from .errors import ArgumentError, DataError


@dataclass(frozen=True)
class Trace:
    """A per-frame scalar series (patch-mean THb, g/litre) at a fixed rate."""

    fps: float
    values: np.ndarray

    def __post_init__(self):
        if self.fps <= 0:
            raise ArgumentError(f"fps must be > 0, got {self.fps}")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise ArgumentError(f"trace values must be 1-D, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.values)) / self.fps


def patch_mean(
    maps: Iterable[ConcentrationMap], rect: tuple[int, int, int, int], fps: float
) -> Trace:
    """Mean THb inside rect = (x, y, w, h) per frame.

    Non-finite pixels are excluded; a frame with no valid pixels is recorded
    as missing and filled by linear interpolation between its neighbours.
    """
    x, y, w, h = (int(v) for v in rect)
    if w < 1 or h < 1:
        raise ArgumentError(f"rect must have positive area, got {rect}")
    values = []
    for cmap in maps:
        if x < 0 or y < 0 or x + w > cmap.width or y + h > cmap.height:
            raise ArgumentError(
                f"rect {rect} outside {cmap.width}x{cmap.height} map bounds"
            )
        patch = cmap.thb[y : y + h, x : x + w]
        valid = np.isfinite(patch)
        values.append(float(patch[valid].mean()) if valid.any() else np.nan)
    series = np.asarray(values)
    if series.size == 0:
        return Trace(fps=fps, values=series)
    missing = np.isnan(series)
    if missing.all():
        raise DataError("no frame in the sequence has a valid THb pixel in rect")
    if missing.any():
        idx = np.arange(series.size)
        series[missing] = np.interp(idx[missing], idx[~missing], series[~missing])
    return Trace(fps=fps, values=series)


def smooth_derivative(trace: Trace, window_s: float) -> Trace:
    """Moving-average smoothing then finite differencing (g/litre per second).

    The window is round(window_s * fps) samples; interior points use central
    differences, the endpoints one-sided ones. Even window widths carry the
    usual half-sample lag, which leaves magnitude spectra untouched.
    """
    window = int(round(window_s * trace.fps))
    if window < 1:
        raise ArgumentError(
            f"window_s * fps must round to >= 1 sample, got {window_s} * {trace.fps}"
        )
    if len(trace) < max(window, 2):
        raise ArgumentError(f"trace of {len(trace)} samples is shorter than the window")
    smoothed = uniform_filter1d(trace.values, size=window, mode="nearest")
    return Trace(fps=trace.fps, values=np.gradient(smoothed) * trace.fps)


def dominant_frequency(
    trace: Trace,
    band_hz: tuple[float, float] = (0.6, 3.0),
    detrend: str = "mean",
) -> tuple[float, float]:
    """Locate the strongest spectral peak inside a band.

    Pipeline: detrend, Hann window, magnitude spectrum, restrict to the
    band, take the maximum bin, and refine it by a quadratic fit through
    the log power of the bin and its two neighbours. Returns
    (peak_hz, power_fraction) where power_fraction is the peak bin's share
    of the band power; low fractions mean no confident peak.
    """
    lo, hi = band_hz
    if not 0 < lo < hi:
        raise ArgumentError(f"band must satisfy 0 < lo < hi, got {band_hz}")
    if hi >= trace.fps / 2:
        raise ArgumentError(f"band upper edge {hi} must be below Nyquist {trace.fps / 2}")
    n = len(trace)
    if n < 4:
        raise ArgumentError(f"trace too short for spectral analysis ({n} < 4 samples)")

    x = trace.values - trace.values.mean()
    if detrend == "linear":
        t = np.arange(n) - (n - 1) / 2.0
        x = x - (x @ t) / (t @ t) * t
    elif detrend != "mean":
        raise ArgumentError(f"detrend must be 'mean' or 'linear', got {detrend!r}")

    power = np.abs(np.fft.rfft(x * np.hanning(n))) ** 2
    freqs = np.fft.rfftfreq(n, 1.0 / trace.fps)
    in_band = np.flatnonzero((freqs >= lo) & (freqs <= hi))
    if in_band.size == 0:
        raise ArgumentError(
            f"band {band_hz} Hz contains no spectral bins at resolution "
            f"{trace.fps / n:.4g} Hz; use a longer trace"
        )
    band_power = power[in_band]
    k = int(in_band[np.argmax(band_power)])
    total = float(band_power.sum())
    fraction = float(power[k] / total) if total > 0 else 0.0

    delta = 0.0
    if 0 < k < len(power) - 1 and np.all(power[k - 1 : k + 2] > 0):
        la, lb, lc = np.log(power[k - 1 : k + 2])
        denom = la - 2 * lb + lc
        if denom < 0:  # genuine local maximum in log power
            delta = float(np.clip(0.5 * (la - lc) / denom, -1.0, 1.0))
    return float((k + delta) * trace.fps / n), fraction


@dataclass(frozen=True)
class PulseReport:
    """Everything the pulse analysis produces for one map sequence."""

    trace: Trace
    derivative: Trace
    peak_hz: float
    power_fraction: float

    @property
    def bpm(self) -> float:
        return 60.0 * self.peak_hz


def analyze_pulse(
    maps: Iterable[ConcentrationMap],
    rect: tuple[int, int, int, int],
    fps: float,
    band_hz: tuple[float, float] = (0.6, 3.0),
    window_s: float = 0.4,
) -> PulseReport:
    """Patch-mean trace -> smoothed derivative -> dominant band frequency."""
    trace = patch_mean(maps, rect, fps)
    derivative = smooth_derivative(trace, window_s)
    peak_hz, fraction = dominant_frequency(derivative, band_hz)
    return PulseReport(
        trace=trace, derivative=derivative, peak_hz=peak_hz, power_fraction=fraction
    )
