"""Analytic quantization-error bounds, Monte-Carlo roundtrip audits and
representation cost accounting."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import HeatmapConfig, ImageDims, SimDRConfig
from .decoders import decode_heatmap_batch, decode_simdr_batch
from .encoders import encode_simdr_batch, heatmap_axis_profiles

CHUNK = 8192
HIST_BINS = 20
AUDIT_HEATMAP_SIGMA = 2.0
CSV_FIELDS = ["scheme", "param", "width", "height", "n", "max_err", "mean_err", "bound"]


@dataclass(frozen=True)
class Scheme:
    name: Literal["simdr", "heatmap"]
    param: int

    def __post_init__(self):
        if self.name not in ("simdr", "heatmap"):
            raise ValueError(f"unknown scheme {self.name!r}")
        if int(self.param) != self.param or self.param < 1:
            raise ValueError(f"scheme parameter must be an integer >= 1, got {self.param}")

    @property
    def bound(self) -> float:
        return simdr_error_bound(self.param) if self.name == "simdr" else heatmap_error_bound(self.param)


def simdr(k: int) -> Scheme:
    return Scheme("simdr", k)


def heatmap(lam: int) -> Scheme:
    return Scheme("heatmap", lam)


@dataclass(frozen=True)
class ErrorStats:
    scheme: Scheme
    dims: ImageDims
    n_samples: int
    max_err: float
    mean_err: float
    bound: float
    histogram: tuple[int, ...]

    @property
    def within_bound(self) -> bool:
        return self.max_err <= self.bound

    def as_row(self) -> dict:
        return {
            "scheme": self.scheme.name,
            "param": self.scheme.param,
            "width": self.dims.width,
            "height": self.dims.height,
            "n": self.n_samples,
            "max_err": repr(self.max_err),
            "mean_err": repr(self.mean_err),
            "bound": repr(self.bound),
        }


@dataclass(frozen=True)
class CostReport:
    simdr_elements: int
    heatmap_elements: int


def simdr_error_bound(k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    return 1.0 / (2 * k)


def heatmap_error_bound(lam: int) -> float:
    if lam < 1:
        raise ValueError("lambda must be >= 1")
    return lam / 2.0


def representation_cost(dims: ImageDims, k: int, lam: int) -> CostReport:
    if k < 1 or lam < 1:
        raise ValueError("k and lambda must be >= 1")
    if dims.width % lam or dims.height % lam:
        raise ValueError(f"dims {dims} not divisible by lambda={lam}")
    return CostReport(k * (dims.width + dims.height), (dims.width // lam) * (dims.height // lam))


def sample_range(scheme: Scheme, dims: ImageDims, edge_inclusive: bool = False) -> tuple[float, float]:
    """Upper limits (exclusive) of the uniform keypoint draw along x and y.

    The default keeps every keypoint out of the clamped last bin/cell.
    """
    if edge_inclusive:
        return float(dims.width), float(dims.height)
    if scheme.name == "simdr":
        return float(dims.width - 1), float(dims.height - 1)
    margin = max(1.0, scheme.param / 2)
    return dims.width - margin, dims.height - margin


def roundtrip_errors(scheme: Scheme, xs: np.ndarray, ys: np.ndarray, dims: ImageDims,
                     sigma: float = AUDIT_HEATMAP_SIGMA) -> np.ndarray:
    """Per-axis absolute encode->decode errors, shape ``(N, 2)``."""
    if scheme.name == "simdr":
        cfg = SimDRConfig(scheme.param, dims)
        x_vec, y_vec = encode_simdr_batch(xs, ys, cfg)
        dec = decode_simdr_batch(x_vec, y_vec, cfg.k)
    else:
        cfg = HeatmapConfig(scheme.param, sigma, dims)
        gx, gy = heatmap_axis_profiles(xs, ys, cfg)
        # The grid is outer(gy, gx) with positive factors, so its row-major argmax
        # is (argmax gy, argmax gx); decode each factor as a one-row/one-column grid.
        dec_x = decode_heatmap_batch(gx[:, None, :], cfg.lam)
        dec_y = decode_heatmap_batch(gy[:, :, None], cfg.lam)
        dec = np.stack([dec_x[:, 0], dec_y[:, 1]], axis=-1)
    return np.abs(np.stack([dec[:, 0] - xs, dec[:, 1] - ys], axis=-1))


def _chunk_stats(scheme, dims, seed_seq, n, edge_inclusive, bound):
    rng = np.random.default_rng(seed_seq)
    hi_x, hi_y = sample_range(scheme, dims, edge_inclusive)
    xs = rng.uniform(0.0, hi_x, n)
    ys = rng.uniform(0.0, hi_y, n)
    err = roundtrip_errors(scheme, xs, ys, dims).ravel()
    hist, _ = np.histogram(np.minimum(err, bound), bins=HIST_BINS, range=(0.0, bound))
    return err.max(), err.sum(), hist


def audit_roundtrip(scheme: Scheme, dims: ImageDims, n: int, seed: int,
                    edge_inclusive: bool = False, workers: int = 1) -> ErrorStats:
    """Encode ``n`` uniform keypoints with the exact target, decode by plain argmax and
    summarise the per-axis errors against the analytic bound.

    Samples are drawn in fixed-size chunks, each from its own child of
    ``SeedSequence(seed)``, so results do not depend on ``workers``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    bound = scheme.bound
    sizes = [min(CHUNK, n - start) for start in range(0, n, CHUNK)]
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(scheme, dims, s, m, edge_inclusive, bound) for s, m in zip(seeds, sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _chunk_stats(*a), jobs))
    else:
        parts = [_chunk_stats(*a) for a in jobs]
    max_err = float(max(p[0] for p in parts))
    # fsum keeps the merged sum independent of chunk order
    mean_err = math.fsum(p[1] for p in parts) / (2 * n)
    hist = np.sum([p[2] for p in parts], axis=0)
    return ErrorStats(scheme, dims, n, max_err, mean_err, bound, tuple(int(c) for c in hist))


def stats_to_csv(stats: list[ErrorStats]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for s in stats:
        writer.writerow(s.as_row())
    return buf.getvalue()
