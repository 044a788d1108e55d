"""Coordinate recovery from 1D score vectors and 2D heatmaps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoders import HeatmapTarget

SHIFT = 0.25


@dataclass(frozen=True)
class DecodedKeypoint:
    x: float
    y: float
    confidence: float


def decode_simdr_batch(x_vecs, y_vecs, k: int) -> np.ndarray:
    """``(N, 3)`` array of ``x, y, confidence``; argmax ties go to the lowest index."""
    x_vecs = np.atleast_2d(np.asarray(x_vecs, dtype=float))
    y_vecs = np.atleast_2d(np.asarray(y_vecs, dtype=float))
    if x_vecs.shape[-1] == 0 or y_vecs.shape[-1] == 0:
        raise ValueError("cannot decode an empty score vector")
    ix = x_vecs.argmax(axis=-1)
    iy = y_vecs.argmax(axis=-1)
    rows = np.arange(len(ix))
    conf = 0.5 * (x_vecs[rows, ix] + y_vecs[rows, iy])
    return np.stack([ix / k, iy / k, conf], axis=-1)


def decode_simdr(x_vec, y_vec, k: int) -> DecodedKeypoint:
    x, y, conf = decode_simdr_batch(x_vec, y_vec, k)[0]
    return DecodedKeypoint(float(x), float(y), float(conf))


def _shift_along(grids, rows, j, i, axis):
    """+1, -1 or 0 per sample: direction of the larger neighbour along ``axis``."""
    n = grids.shape[1 + axis]
    pos = i if axis == 1 else j
    inner = (pos > 0) & (pos < n - 1)
    lo = np.clip(pos - 1, 0, n - 1)
    hi = np.clip(pos + 1, 0, n - 1)
    if axis == 1:
        a, b = grids[rows, j, lo], grids[rows, j, hi]
    else:
        a, b = grids[rows, lo, i], grids[rows, hi, i]
    return np.where(inner, np.sign(b - a), 0.0)


def decode_heatmap_batch(grids, lam: int, shift: bool = False) -> np.ndarray:
    """Argmax decode of a ``(N, rows, cols)`` stack into ``(N, 3)`` pixel coordinates.

    With ``shift`` the argmax cell moves a quarter cell toward its larger
    horizontal/vertical neighbour before scaling by ``lam``. Border cells and
    exact neighbour ties are left in place.
    """
    grids = np.asarray(grids, dtype=float)
    if grids.ndim == 2:
        grids = grids[None]
    if grids.size == 0:
        raise ValueError("cannot decode an empty heatmap")
    n, h, w = grids.shape
    flat = grids.reshape(n, -1).argmax(axis=-1)
    j, i = np.divmod(flat, w)
    rows = np.arange(n)
    conf = grids[rows, j, i]
    x = i.astype(float)
    y = j.astype(float)
    if shift:
        x += SHIFT * _shift_along(grids, rows, j, i, axis=1)
        y += SHIFT * _shift_along(grids, rows, j, i, axis=0)
    return np.stack([x * lam, y * lam, conf], axis=-1)


def decode_heatmap(grid, lam: int | None = None, shift: bool = False) -> DecodedKeypoint:
    """Decode one heatmap; ``grid`` is a :class:`HeatmapTarget` or a raw 2D array plus ``lam``."""
    if isinstance(grid, HeatmapTarget):
        lam = grid.config.lam if lam is None else lam
        grid = grid.grid
    if lam is None:
        raise ValueError("lam is required when decoding a raw grid")
    x, y, conf = decode_heatmap_batch(np.asarray(grid)[None], lam, shift)[0]
    return DecodedKeypoint(float(x), float(y), float(conf))
