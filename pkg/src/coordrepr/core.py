"""Domain types and the coordinate quantization shared by every encoder/decoder."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

PeakMode = Literal["exact-eq1", "peak-one"]


@dataclass(frozen=True)
class ImageDims:
    width: int
    height: int

    def __post_init__(self):
        if int(self.width) != self.width or int(self.height) != self.height:
            raise ValueError(f"dims must be integers, got {self.width}x{self.height}")
        if self.width < 1 or self.height < 1:
            raise ValueError(f"dims must be positive, got {self.width}x{self.height}")

    @classmethod
    def parse(cls, text: str) -> "ImageDims":
        """Parse ``"HxW"`` (height first, as input sizes are usually quoted)."""
        try:
            h, w = (int(p) for p in text.lower().split("x"))
        except ValueError:
            raise ValueError(f"bad dims {text!r}, expected HxW such as 256x192") from None
        return cls(width=w, height=h)

    def __str__(self):
        return f"{self.height}x{self.width}"


@dataclass(frozen=True)
class Keypoint:
    x: float
    y: float
    visible: bool = True

    def check_inside(self, dims: ImageDims) -> None:
        if not (0 <= self.x < dims.width and 0 <= self.y < dims.height):
            raise ValueError(
                f"keypoint ({self.x}, {self.y}) outside image {dims.width}x{dims.height} (WxH)"
            )


@dataclass(frozen=True)
class Pose:
    keypoints: tuple[Keypoint, ...]
    object_scale: float
    per_type_constants: tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "keypoints", tuple(self.keypoints))
        consts = tuple(self.per_type_constants) or (1.0,) * len(self.keypoints)
        object.__setattr__(self, "per_type_constants", consts)
        if len(consts) != len(self.keypoints):
            raise ValueError("per_type_constants must match the number of keypoints")
        if self.object_scale <= 0:
            raise ValueError("object_scale must be positive")
        if any(c <= 0 for c in consts):
            raise ValueError("per_type_constants must be positive")


@dataclass(frozen=True)
class SimDRConfig:
    k: int
    dims: ImageDims

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"splitting factor must be an integer >= 1, got {self.k}")

    @property
    def x_len(self) -> int:
        return self.dims.width * self.k

    @property
    def y_len(self) -> int:
        return self.dims.height * self.k


@dataclass(frozen=True)
class HeatmapConfig:
    lam: int
    sigma: float
    dims: ImageDims
    peak_mode: PeakMode = "peak-one"

    def __post_init__(self):
        if int(self.lam) != self.lam or self.lam < 1:
            raise ValueError(f"downsampling ratio must be an integer >= 1, got {self.lam}")
        if self.dims.width % self.lam or self.dims.height % self.lam:
            raise ValueError(f"dims {self.dims.width}x{self.dims.height} (WxH) not divisible by lambda={self.lam}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.peak_mode not in ("exact-eq1", "peak-one"):
            raise ValueError(f"unknown peak_mode {self.peak_mode!r}")

    @property
    def grid_shape(self) -> tuple[int, int]:
        """(rows, cols) of the heatmap grid."""
        return self.dims.height // self.lam, self.dims.width // self.lam


def round_half_up(v):
    return np.floor(np.asarray(v, dtype=float) + 0.5)


def quantize_coord(v, k: int, n_bins: int):
    """Bin index of coordinate ``v`` at ``k`` bins per pixel, clamped to ``[0, n_bins-1]``.

    Works elementwise on arrays; a scalar input returns a Python int.
    """
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    arr = np.asarray(v, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("coordinates must be non-negative")
    idx = np.clip(round_half_up(arr * k), 0, n_bins - 1).astype(np.int64)
    return int(idx) if idx.ndim == 0 else idx


def dequantize_coord(idx, k: int):
    if k < 1:
        raise ValueError("k must be >= 1")
    out = np.asarray(idx, dtype=float) / k
    return float(out) if out.ndim == 0 else out


def half_bin(k: int) -> float:
    return 1.0 / (2 * k)


def default_object_scale(dims: ImageDims) -> float:
    return math.sqrt(dims.width * dims.height)
