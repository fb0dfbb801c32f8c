#!/usr/bin/env python3
"""Regenerate the packaged coefficient tables in src/oximap/data/.

The curves are illustrative, shape-plausible visible-range data synthesised
from sums of Gaussians: a Bayer-style RGB camera response and effective
backscatter attenuation for oxy-/deoxy-haemoglobin (double green peak vs
single broad peak, crossover above 600 nm). They are NOT measured values;
all self-consistency tests use these same tables on both sides.
"""

import pathlib

import numpy as np

DATA_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "oximap" / "data"


def g(x, centre, sigma):
    return np.exp(-0.5 * ((x - centre) / sigma) ** 2)


def camera_rows():
    wl = np.arange(440.0, 711.0, 5.0)
    red = 0.92 * g(wl, 605, 32) + 0.015 * g(wl, 460, 40)
    green = 1.00 * g(wl, 540, 34) + 0.010 * g(wl, 640, 40)
    blue = 0.90 * g(wl, 462, 26) + 0.012 * g(wl, 550, 45)
    return wl, {"red": red, "green": green, "blue": blue}


def chromophore_rows():
    # Effective reflection-mode attenuation sits well below pure absorption
    # (returning light samples shallow paths); amplitudes keep the iterative
    # estimator contractive for total haemoglobin up to ~140 g/litre.
    wl = np.arange(440.0, 711.0, 2.0)
    hbo = (
        0.036 * g(wl, 445, 26)
        + 0.0186 * g(wl, 542, 12)
        + 0.0174 * g(wl, 577, 11)
        + 0.0021
        + 0.0009 * g(wl, 700, 90)
    )
    hb = (
        0.0378 * g(wl, 435, 28)
        + 0.0276 * g(wl, 556, 22)
        + 0.0045
        + 0.0036 * g(wl, 757, 55)
    )
    return wl, {"hbo": hbo, "hb": hb}


def write_csv(path, wl, cols, note):
    names = list(cols)
    lines = [f"# {note}", "wavelength_nm," + ",".join(names)]
    for i, w in enumerate(wl):
        vals = ",".join(f"{cols[n][i]:.6g}" for n in names)
        lines.append(f"{w:g},{vals}")
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path} ({len(wl)} rows)")


def main():
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    wl, cols = camera_rows()
    write_csv(
        DATA_DIR / "camera_rgb.csv",
        wl,
        cols,
        "illustrative RGB camera sensitivity (shape-plausible synthetic curves, not measured)",
    )
    wl, cols = chromophore_rows()
    write_csv(
        DATA_DIR / "hb_attenuation.csv",
        wl,
        cols,
        "illustrative effective backscatter attenuation, litre/g "
        "(shape-plausible synthetic curves, not measured)",
    )


if __name__ == "__main__":
    main()
