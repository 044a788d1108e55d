"""Supervision targets: 2D Gaussian heatmaps, one-hot / smoothed 1D vectors and
space-aware 1D Gaussian vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import HeatmapConfig, Keypoint, SimDRConfig, quantize_coord

TargetKind = Literal["one-hot", "smoothed", "space-aware"]

DEFAULT_SA_SIGMA = 2.0
DEFAULT_EPSILON = 0.1


@dataclass(frozen=True)
class SimDRTarget:
    x_vec: np.ndarray
    y_vec: np.ndarray
    kind: TargetKind


@dataclass(frozen=True)
class HeatmapTarget:
    grid: np.ndarray
    config: HeatmapConfig


def _peak_constant(cfg: HeatmapConfig) -> float:
    # |Sigma|^(1/2) = sigma^2 for Sigma = sigma^2 I in two dimensions
    return 1.0 / (2 * math.pi * cfg.sigma**2) if cfg.peak_mode == "exact-eq1" else 1.0


def heatmap_axis_profiles(xs, ys, cfg: HeatmapConfig) -> tuple[np.ndarray, np.ndarray]:
    """Separable factors of the heatmap for a batch of keypoints.

    Returns ``(gx, gy)`` with shapes ``(N, cols)`` and ``(N, rows)`` such that
    ``grid[n] = c * outer(gy[n], gx[n])``.  No peak constant is applied.
    """
    rows, cols = cfg.grid_shape
    mu_x = np.asarray(xs, dtype=float)[:, None] / cfg.lam
    mu_y = np.asarray(ys, dtype=float)[:, None] / cfg.lam
    two_var = 2.0 * cfg.sigma**2
    gx = np.exp(-((np.arange(cols) - mu_x) ** 2) / two_var)
    gy = np.exp(-((np.arange(rows) - mu_y) ** 2) / two_var)
    return gx, gy


def encode_heatmap_batch(xs, ys, cfg: HeatmapConfig, visible=None) -> np.ndarray:
    """Stack of ``(N, rows, cols)`` heatmaps; invisible rows are all zero."""
    gx, gy = heatmap_axis_profiles(xs, ys, cfg)
    grids = _peak_constant(cfg) * gy[:, :, None] * gx[:, None, :]
    if visible is not None:
        grids *= np.asarray(visible, dtype=bool)[:, None, None]
    return grids


def encode_heatmap(kp: Keypoint, cfg: HeatmapConfig) -> HeatmapTarget:
    kp.check_inside(cfg.dims)
    if not kp.visible:
        return HeatmapTarget(np.zeros(cfg.grid_shape), cfg)
    grid = encode_heatmap_batch([kp.x], [kp.y], cfg)[0]
    return HeatmapTarget(grid, cfg)


def _one_hot(idx: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((len(idx), n))
    out[np.arange(len(idx)), idx] = 1.0
    return out


def encode_simdr_batch(xs, ys, cfg: SimDRConfig, visible=None) -> tuple[np.ndarray, np.ndarray]:
    """One-hot x/y vectors for a batch of keypoints, shapes ``(N, W*k)`` and ``(N, H*k)``."""
    ix = np.atleast_1d(quantize_coord(xs, cfg.k, cfg.x_len))
    iy = np.atleast_1d(quantize_coord(ys, cfg.k, cfg.y_len))
    x_vec, y_vec = _one_hot(ix, cfg.x_len), _one_hot(iy, cfg.y_len)
    if visible is not None:
        mask = np.asarray(visible, dtype=bool)[:, None]
        x_vec *= mask
        y_vec *= mask
    return x_vec, y_vec


def encode_simdr(kp: Keypoint, cfg: SimDRConfig) -> SimDRTarget:
    kp.check_inside(cfg.dims)
    x_vec, y_vec = encode_simdr_batch([kp.x], [kp.y], cfg, visible=[kp.visible])
    return SimDRTarget(x_vec[0], y_vec[0], "one-hot")


def smooth_vectors(vecs: np.ndarray, epsilon: float) -> np.ndarray:
    """Mix one-hot rows with the uniform distribution; all-zero rows stay zero."""
    if not 0 <= epsilon < 1:
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}")
    vecs = np.asarray(vecs, dtype=float)
    n = vecs.shape[-1]
    live = vecs.sum(axis=-1, keepdims=True) > 0
    return np.where(live, (1 - epsilon) * vecs + epsilon / n, 0.0)


def smooth_labels(t: SimDRTarget, epsilon: float = DEFAULT_EPSILON) -> SimDRTarget:
    if t.kind != "one-hot":
        raise ValueError(f"label smoothing expects a one-hot target, got {t.kind}")
    return SimDRTarget(smooth_vectors(t.x_vec, epsilon), smooth_vectors(t.y_vec, epsilon), "smoothed")


def gaussian_bins(centers, n: int, sigma: float, renormalize: bool) -> np.ndarray:
    centers = np.asarray(centers, dtype=float)[:, None]
    vec = np.exp(-((np.arange(n) - centers) ** 2) / (2 * sigma**2)) / (math.sqrt(2 * math.pi) * sigma)
    if renormalize:
        vec /= vec.sum(axis=-1, keepdims=True)
    return vec


def encode_simdr_sa_batch(xs, ys, cfg: SimDRConfig, sigma: float = DEFAULT_SA_SIGMA,
                          renormalize: bool = True, visible=None) -> tuple[np.ndarray, np.ndarray]:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    ix = np.atleast_1d(quantize_coord(xs, cfg.k, cfg.x_len))
    iy = np.atleast_1d(quantize_coord(ys, cfg.k, cfg.y_len))
    x_vec = gaussian_bins(ix, cfg.x_len, sigma, renormalize)
    y_vec = gaussian_bins(iy, cfg.y_len, sigma, renormalize)
    if visible is not None:
        mask = np.asarray(visible, dtype=bool)[:, None]
        x_vec *= mask
        y_vec *= mask
    return x_vec, y_vec


def encode_simdr_sa(kp: Keypoint, cfg: SimDRConfig, sigma: float = DEFAULT_SA_SIGMA,
                    renormalize: bool = True) -> SimDRTarget:
    """Space-aware target: a 1D Gaussian in bin units centred on the quantized index."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    kp.check_inside(cfg.dims)
    x_vec, y_vec = encode_simdr_sa_batch([kp.x], [kp.y], cfg, sigma, renormalize, visible=[kp.visible])
    return SimDRTarget(x_vec[0], y_vec[0], "space-aware")
