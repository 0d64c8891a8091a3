"""Minimal binary PGM (P5) writer for grayscale heatmaps.

Rows are written in array order: row 0 of the pixel array is the first
row in the file. For cost-field images row 0 is the minimum-y lattice
row, so viewers that draw the first row at the top show y increasing
downward.
"""
from __future__ import annotations

import os

import numpy as np


def pgm_bytes(pixels: np.ndarray) -> bytes:
    if pixels.ndim != 2:
        raise ValueError(f"expected a 2D pixel array, got shape {pixels.shape}")
    if pixels.dtype != np.uint8:
        raise ValueError(f"expected uint8 pixels, got {pixels.dtype}")
    h, w = pixels.shape
    header = f"P5\n{w} {h}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(pixels).tobytes()


def write_pgm(path: str | os.PathLike, pixels: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(pgm_bytes(pixels))
