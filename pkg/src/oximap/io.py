"""File formats: SPC1 spectral containers, 16-bit pixmaps, coefficient
tables, and trace CSVs.

SPC1 is a deliberately minimal container: one ASCII header line
``SPC1 <height> <width> <L> <start_nm> <step_nm>`` followed by H*W*L
little-endian 32-bit IEEE floats in row-major (y, x, wavelength) order.
Concentration maps reuse it with L = 3 and the reserved grid
(start 0, step 1), channel order (hbo, hb, offset).
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .core import (
    MAP_GRID,
    CameraSensitivity,
    ChromophoreBasis,
    ConcentrationMap,
    RgbImage,
    SpectralCube,
    WavelengthGrid,
    resample_to_grid,
)
from .errors import DataError
from .timeseries import Trace

_SPC_MAGIC = "SPC1"


def _write_spc_array(path, data: np.ndarray, grid: WavelengthGrid) -> None:
    h, w, l_bands = data.shape
    header = f"{_SPC_MAGIC} {h} {w} {l_bands} {grid.start_nm!r} {grid.step_nm!r}\n"
    with open(path, "wb") as f:
        f.write(header.encode("ascii"))
        f.write(np.ascontiguousarray(data, dtype="<f4").tobytes())


def _read_spc_array(path, expect_grid: WavelengthGrid | None):
    path = Path(path)
    with open(path, "rb") as f:
        header = f.readline()
        payload = f.read()
    fields = header.decode("ascii", errors="replace").split()
    if len(fields) != 6 or fields[0] != _SPC_MAGIC:
        raise DataError(f"{path}: malformed SPC1 header {header!r}")
    try:
        h, w, l_bands = (int(v) for v in fields[1:4])
        start_nm, step_nm = (float(v) for v in fields[4:6])
    except ValueError as exc:
        raise DataError(f"{path}: malformed SPC1 header fields: {exc}") from exc
    if h < 1 or w < 1 or l_bands < 1:
        raise DataError(f"{path}: non-positive SPC1 dimensions {h}x{w}x{l_bands}")
    expected_bytes = h * w * l_bands * 4
    if len(payload) != expected_bytes:
        raise DataError(
            f"{path}: truncated payload, expected {expected_bytes} bytes, "
            f"got {len(payload)}"
        )
    grid = WavelengthGrid(start_nm=start_nm, step_nm=step_nm, count=l_bands)
    if expect_grid is not None and grid != expect_grid:
        raise DataError(f"{path}: grid {grid} does not match expected {expect_grid}")
    data = np.frombuffer(payload, dtype="<f4").reshape(h, w, l_bands).astype(np.float64)
    return data, grid


def write_spc(path, cube: SpectralCube) -> None:
    _write_spc_array(path, cube.data, cube.grid)


def read_spc(path, expect_grid: WavelengthGrid | None = None) -> SpectralCube:
    data, grid = _read_spc_array(path, expect_grid)
    return SpectralCube(grid=grid, data=data)


def write_map_spc(path, cmap: ConcentrationMap) -> None:
    _write_spc_array(path, cmap.stacked(), MAP_GRID)


def read_map_spc(path) -> ConcentrationMap:
    data, _ = _read_spc_array(path, MAP_GRID)
    return ConcentrationMap.from_stacked(data)


def write_ppm(path, image: RgbImage, scale: float | None = None) -> None:
    """16-bit binary pixmap with a ``# scale`` comment (physical units per count).

    ``scale`` defaults to max(data)/65535 so the full range is used; values
    above scale*65535 saturate.
    """
    data = image.data
    if np.any(data < 0):
        raise DataError("pixmaps cannot represent negative values")
    if scale is None:
        peak = float(data.max())
        scale = peak / 65535.0 if peak > 0 else 1.0
    elif scale <= 0:
        raise DataError(f"scale must be > 0, got {scale}")
    counts = np.clip(np.round(data / scale), 0, 65535).astype(">u2")
    with open(path, "wb") as f:
        f.write(f"P6\n# scale {scale!r}\n{image.width} {image.height}\n65535\n".encode("ascii"))
        f.write(counts.tobytes())


def _ppm_tokens(buf: bytes, path):
    """Yield header tokens, tracking '# scale' comments; returns via StopIteration."""
    scale = None
    i = 0
    tokens = []
    while len(tokens) < 4 and i < len(buf):
        ch = buf[i : i + 1]
        if ch == b"#":
            j = buf.find(b"\n", i)
            if j < 0:
                raise DataError(f"{path}: unterminated header comment")
            comment = buf[i + 1 : j].decode("ascii", errors="replace").split()
            if len(comment) == 2 and comment[0] == "scale":
                try:
                    scale = float(comment[1])
                except ValueError as exc:
                    raise DataError(f"{path}: bad scale comment: {exc}") from exc
            i = j + 1
        elif ch.isspace():
            i += 1
        else:
            j = i
            while j < len(buf) and not buf[j : j + 1].isspace() and buf[j : j + 1] != b"#":
                j += 1
            tokens.append(buf[i:j])
            i = j
    if len(tokens) < 4:
        raise DataError(f"{path}: truncated pixmap header")
    return tokens, scale, i + 1  # single whitespace after maxval ends the header


def read_ppm(path) -> RgbImage:
    path = Path(path)
    buf = path.read_bytes()
    if not buf.startswith(b"P6"):
        raise DataError(f"{path}: not a binary pixmap (missing P6 magic)")
    tokens, scale, offset = _ppm_tokens(buf, path)
    try:
        w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as exc:
        raise DataError(f"{path}: malformed pixmap header: {exc}") from exc
    if maxval != 65535:
        raise DataError(f"{path}: expected 16-bit pixmap (maxval 65535), got {maxval}")
    if w < 1 or h < 1:
        raise DataError(f"{path}: non-positive pixmap dimensions {w}x{h}")
    raster = buf[offset:]
    expected = w * h * 3 * 2
    if len(raster) != expected:
        raise DataError(
            f"{path}: truncated raster, expected {expected} bytes, got {len(raster)}"
        )
    counts = np.frombuffer(raster, dtype=">u2").reshape(h, w, 3)
    if scale is None:
        scale = 1.0
    return RgbImage(data=counts.astype(np.float64) * scale)


def _read_table_csv(path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    rows = []
    header = None
    with open(path, newline="") as f:
        for record in csv.reader(f):
            if not record or record[0].lstrip().startswith("#"):
                continue
            if header is None:
                header = [field.strip() for field in record]
                continue
            rows.append(record)
    if header is None or not rows:
        raise DataError(f"{path}: empty table")
    if header[0] != "wavelength_nm":
        raise DataError(f"{path}: first column must be 'wavelength_nm', got {header[0]!r}")
    try:
        table = np.array([[float(v) for v in row] for row in rows])
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric table entry: {exc}") from exc
    if table.ndim != 2 or table.shape[1] != len(header):
        raise DataError(f"{path}: ragged table rows")
    if np.any(np.diff(table[:, 0]) <= 0):
        raise DataError(f"{path}: wavelengths must be strictly increasing")
    return header[1:], table


def load_sensitivity_csv(path, grid: WavelengthGrid) -> CameraSensitivity:
    """Load a 3-channel sensitivity table and resample it onto ``grid``."""
    names, table = _read_table_csv(path)
    if len(names) != 3:
        raise DataError(f"{path}: sensitivity table needs 3 channel columns, got {names}")
    wl = table[:, 0]
    c = np.stack(
        [resample_to_grid(np.column_stack([wl, table[:, k + 1]]), grid) for k in range(3)]
    )
    return CameraSensitivity(grid=grid, c=c)


def load_chromophore_csv(path, grid: WavelengthGrid) -> ChromophoreBasis:
    """Load (hbo, hb) attenuation columns, resample, and append the constant column."""
    names, table = _read_table_csv(path)
    if len(names) < 2:
        raise DataError(f"{path}: chromophore table needs 2 value columns, got {names}")
    wl = table[:, 0]
    cols = [
        resample_to_grid(np.column_stack([wl, table[:, k + 1]]), grid) for k in range(2)
    ]
    xi = np.column_stack(cols + [np.ones(grid.count)])
    return ChromophoreBasis(grid=grid, xi=xi)


def write_trace_csv(path, trace: Trace) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["frame", "time_s", "thb_g_per_l"])
        for i, v in enumerate(trace.values):
            writer.writerow([i, f"{i / trace.fps:.6f}", f"{v:.10g}"])


def read_trace_csv(path) -> Trace:
    path = Path(path)
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["frame", "time_s", "thb_g_per_l"]:
            raise DataError(f"{path}: malformed trace header {header}")
        times, values = [], []
        for row in reader:
            if not row:
                continue
            try:
                times.append(float(row[1]))
                values.append(float(row[2]))
            except (IndexError, ValueError) as exc:
                raise DataError(f"{path}: malformed trace row {row}: {exc}") from exc
    if len(values) < 2:
        raise DataError(f"{path}: trace needs at least 2 rows")
    dt = np.diff(times)
    if np.any(dt <= 0) or not np.allclose(dt, dt[0], rtol=1e-3, atol=1e-9):
        raise DataError(f"{path}: trace times must be uniform and increasing")
    return Trace(fps=1.0 / dt[0], values=np.asarray(values))
