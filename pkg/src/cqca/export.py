"""Deterministic CSV / PGM / JSON writers for heat maps and tables.

All files are UTF-8 with LF line endings. Heat-map CSVs have a header row
``t,<alpha_-L>,...,<alpha_L>`` followed by one row per time step, ``t``
ascending, cells printed with 9 significant digits.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .dynamics import HeatMap

CELL_FORMAT = "{:.9g}"


def _open(path: Path):
    return open(path, "w", encoding="utf-8", newline="\n")


def write_heatmap_csv(h: HeatMap, path) -> Path:
    path = Path(path)
    with _open(path) as fh:
        fh.write("t," + ",".join(str(a) for a in h.alphas) + "\n")
        for t, row in zip(h.times, h.values):
            fh.write(f"{t}," + ",".join(CELL_FORMAT.format(v) for v in row) + "\n")
    return path


def read_heatmap_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(times, alphas, values)`` from a file written by :func:`write_heatmap_csv`."""
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    alphas = np.array([int(a) for a in rows[0][1:]], dtype=np.int64)
    times = np.array([int(r[0]) for r in rows[1:]], dtype=np.int64)
    values = np.array([[float(x) for x in r[1:]] for r in rows[1:]], dtype=float)
    return times, alphas, values.reshape(len(times), len(alphas))


def pgm_pixels(values: np.ndarray) -> np.ndarray:
    """Map ``C in [0, 4]`` linearly onto 0..255."""
    return np.clip(np.rint(np.asarray(values) * (255 / 4)), 0, 255).astype(np.int64)


def write_pgm(values: np.ndarray, path) -> Path:
    """Plain (P2) 8-bit grayscale; first row of ``values`` is the top of the image."""
    path = Path(path)
    pix = pgm_pixels(values)
    height, width = pix.shape
    with _open(path) as fh:
        fh.write(f"P2\n{width} {height}\n255\n")
        for row in pix:
            fh.write(" ".join(str(int(p)) for p in row) + "\n")
    return path


def read_pgm(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        tokens = [tok for line in fh if not line.startswith("#") for tok in line.split()]
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    width, height, _ = (int(x) for x in tokens[1:4])
    return np.array([int(x) for x in tokens[4:]], dtype=np.int64).reshape(height, width)


def write_json(obj, path) -> Path:
    path = Path(path)
    with _open(path) as fh:
        fh.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def write_table(header: list[str], rows, path) -> Path:
    path = Path(path)
    with _open(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path
