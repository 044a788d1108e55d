"""Synthetic blob images and a linear model trained by plain mini-batch SGD.

The model maps a flattened image straight to representation logits: two score
vectors per keypoint for the 1D classification head, or one coarse grid per
keypoint for the heatmap head.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .core import HeatmapConfig, ImageDims, Keypoint, Pose, SimDRConfig, default_object_scale
from .decoders import decode_heatmap_batch, decode_simdr_batch
from .encoders import (
    DEFAULT_EPSILON,
    DEFAULT_SA_SIGMA,
    encode_heatmap_batch,
    encode_simdr_batch,
    encode_simdr_sa_batch,
    smooth_vectors,
)
from .losses import log_softmax, softmax
from .metrics import AP_THRESHOLDS, MatchResult, average_precision, pckh

DEFAULT_OKS_CONSTANT = 0.1
DEFAULT_HEATMAP_SIGMA = 2.0


def child_seed(seed: int, name: str) -> np.random.SeedSequence:
    """Seed for a named consumer of the root seed; names never share a stream."""
    return np.random.SeedSequence([seed, zlib.crc32(name.encode())])


def substream(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(child_seed(seed, name))


@dataclass(frozen=True)
class Head:
    kind: Literal["simdr", "heatmap"]
    k: int = 2
    lam: int = 4
    sigma: float = DEFAULT_HEATMAP_SIGMA

    def __post_init__(self):
        if self.kind not in ("simdr", "heatmap"):
            raise ValueError(f"unknown head {self.kind!r}")

    def simdr_config(self, dims: ImageDims) -> SimDRConfig:
        return SimDRConfig(self.k, dims)

    def heatmap_config(self, dims: ImageDims) -> HeatmapConfig:
        return HeatmapConfig(self.lam, self.sigma, dims)

    def per_keypoint(self, dims: ImageDims) -> int:
        if self.kind == "simdr":
            return self.k * (dims.width + dims.height)
        rows, cols = self.heatmap_config(dims).grid_shape
        return rows * cols

    def describe(self) -> str:
        return f"simdr(k={self.k})" if self.kind == "simdr" else f"heatmap(lambda={self.lam},sigma={self.sigma})"


@dataclass
class ToyModel:
    weights: np.ndarray
    biases: np.ndarray
    head: Head
    n_keypoints: int
    dims: ImageDims

    @property
    def output_size(self) -> int:
        return self.n_keypoints * self.head.per_keypoint(self.dims)

    def copy(self) -> "ToyModel":
        return replace(self, weights=self.weights.copy(), biases=self.biases.copy())


def init_model(dims: ImageDims, head: Head, n_keypoints: int = 1) -> ToyModel:
    """Zero-initialised model; the softmax/MSE objectives are convex in the weights."""
    if head.kind == "heatmap":
        head.heatmap_config(dims)  # validates divisibility
    n_out = n_keypoints * head.per_keypoint(dims)
    n_in = dims.width * dims.height
    return ToyModel(np.zeros((n_out, n_in)), np.zeros(n_out), head, n_keypoints, dims)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.5
    epochs: int = 50
    batch_size: int = 32
    seed: int = 0
    loss: Literal["ce", "kl", "mse"] = "ce"
    epsilon: float = DEFAULT_EPSILON
    sa_sigma: float = DEFAULT_SA_SIGMA

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be non-negative")
        if self.epochs < 0 or self.batch_size < 1:
            raise ValueError("epochs must be >= 0 and batch_size >= 1")
        if self.loss not in ("ce", "kl", "mse"):
            raise ValueError(f"unknown loss {self.loss!r}")


def default_loss(head: Head) -> str:
    return "ce" if head.kind == "simdr" else "mse"


def check_head_loss(head: Head, loss: str) -> None:
    ok = loss in ("ce", "kl") if head.kind == "simdr" else loss == "mse"
    if not ok:
        raise ValueError(f"loss {loss!r} does not match head {head.describe()}")


# --- data -----------------------------------------------------------------

@dataclass(frozen=True)
class SyntheticSample:
    image: np.ndarray
    gt: Pose
    id: int


def render_blobs(coords: np.ndarray, dims: ImageDims, blob_sigma: float) -> np.ndarray:
    """``(N, n_kp, 2)`` keypoints to ``(N, H, W)`` images; keypoint ``p`` has amplitude ``1 - p/(2 n_kp)``."""
    n_kp = coords.shape[1]
    amps = 1.0 - 0.5 * np.arange(n_kp) / n_kp
    u = np.arange(dims.width)
    v = np.arange(dims.height)
    gx = np.exp(-((u[None, None, :] - coords[..., 0:1]) ** 2) / (2 * blob_sigma**2))
    gy = np.exp(-((v[None, None, :] - coords[..., 1:2]) ** 2) / (2 * blob_sigma**2))
    return np.einsum("p,npi,npj->nij", amps, gy, gx)


def make_samples(coords: np.ndarray, images: np.ndarray, ids=None,
                 oks_constant: float = DEFAULT_OKS_CONSTANT) -> list[SyntheticSample]:
    dims = ImageDims(images.shape[2], images.shape[1])
    scale = default_object_scale(dims)
    n_kp = coords.shape[1]
    ids = range(len(coords)) if ids is None else ids
    return [
        SyntheticSample(
            image=img,
            gt=Pose(tuple(Keypoint(float(x), float(y)) for x, y in pts), scale, (oks_constant,) * n_kp),
            id=int(i),
        )
        for i, img, pts in zip(ids, images, coords)
    ]


def gen_dataset(n: int, dims: ImageDims, n_keypoints: int = 1, blob_sigma: float = 1.5,
                noise: float = 0.05, seed=0) -> list[SyntheticSample]:
    """Images with one Gaussian blob per keypoint plus uniform noise in ``[-noise, noise]``.

    Keypoints are continuous-uniform over ``[0, W-1) x [0, H-1)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not blob_sigma > 0:
        raise ValueError("blob_sigma must be positive")
    rng = np.random.default_rng(seed)
    coords = rng.uniform(0.0, 1.0, (n, n_keypoints, 2)) * [dims.width - 1, dims.height - 1]
    images = render_blobs(coords, dims, blob_sigma)
    if noise > 0:
        images = images + rng.uniform(-noise, noise, images.shape)
    images = np.clip(images, 0.0, 1.0)
    return make_samples(coords, images)


def stack(data: list[SyntheticSample]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Images ``(N, H, W)``, coordinates ``(N, n_kp, 2)`` and visibility ``(N, n_kp)``."""
    if not data:
        raise ValueError("dataset is empty")
    images = np.stack([s.image for s in data])
    coords = np.array([[(k.x, k.y) for k in s.gt.keypoints] for s in data], dtype=float)
    visible = np.array([[k.visible for k in s.gt.keypoints] for s in data], dtype=bool)
    return images, coords, visible


# --- model ----------------------------------------------------------------

def forward_batch(model: ToyModel, images: np.ndarray) -> np.ndarray:
    """Raw logits ``(N, output_size)`` for ``(N, H, W)`` images."""
    images = np.asarray(images, dtype=float)
    if images.shape[1:] != (model.dims.height, model.dims.width):
        raise ValueError(f"image shape {images.shape[1:]} does not match model dims {model.dims}")
    return images.reshape(len(images), -1) @ model.weights.T + model.biases


def split_logits(model: ToyModel, logits: np.ndarray):
    """Per-keypoint views: ``(x, y)`` arrays for the 1D head, a grid stack otherwise."""
    n = len(logits)
    per = logits.reshape(n, model.n_keypoints, -1)
    if model.head.kind == "simdr":
        wk = model.dims.width * model.head.k
        return per[..., :wk], per[..., wk:]
    rows, cols = model.head.heatmap_config(model.dims).grid_shape
    return per.reshape(n, model.n_keypoints, rows, cols)


def forward(model: ToyModel, image: np.ndarray):
    """Logits for one image: a list of ``(x_vec, y_vec)`` pairs or of grids, one per keypoint."""
    out = split_logits(model, forward_batch(model, np.asarray(image)[None]))
    if model.head.kind == "simdr":
        return [(out[0][0, p], out[1][0, p]) for p in range(model.n_keypoints)]
    return [out[0, p] for p in range(model.n_keypoints)]


def build_targets(model: ToyModel, coords: np.ndarray, visible: np.ndarray, cfg: TrainConfig) -> np.ndarray:
    """Targets laid out like ``forward_batch`` output."""
    n, n_kp, _ = coords.shape
    xs, ys = coords[..., 0].ravel(), coords[..., 1].ravel()
    vis = visible.ravel()
    if model.head.kind == "heatmap":
        grids = encode_heatmap_batch(xs, ys, model.head.heatmap_config(model.dims), vis)
        return grids.reshape(n, -1)
    scfg = model.head.simdr_config(model.dims)
    if cfg.loss == "kl":
        xv, yv = encode_simdr_sa_batch(xs, ys, scfg, cfg.sa_sigma, True, vis)
    else:
        xv, yv = encode_simdr_batch(xs, ys, scfg, vis)
        xv, yv = smooth_vectors(xv, cfg.epsilon), smooth_vectors(yv, cfg.epsilon)
    return np.concatenate([xv, yv], axis=-1).reshape(n, -1)


def loss_and_grad(model: ToyModel, images: np.ndarray, targets: np.ndarray,
                  visible: np.ndarray, loss: str) -> tuple[float, np.ndarray, np.ndarray]:
    """Batch loss and its gradient w.r.t. weights and biases.

    1D head: the x and y losses of each keypoint are summed, then averaged over
    visible keypoints. Heatmap head: MSE over all cells of visible keypoints.
    """
    check_head_loss(model.head, loss)
    n = len(images)
    flat = images.reshape(n, -1)
    logits = flat @ model.weights.T + model.biases
    vis = np.asarray(visible, dtype=bool)
    if model.head.kind == "simdr":
        lx, ly = split_logits(model, logits)
        tx, ty = split_logits(model, targets)
        n_vis = max(int(vis.sum()), 1)
        value = 0.0
        grads = []
        for lg, tg in ((lx, tx), (ly, ty)):
            logp = log_softmax(lg)
            if loss == "kl":
                safe = np.where(tg > 0, tg, 1.0)
                per = np.sum(np.where(tg > 0, tg * (np.log(safe) - logp), 0.0), axis=-1)
            else:
                per = -np.sum(tg * logp, axis=-1)
            value += float(np.sum(per[vis]))
            grads.append((softmax(lg) - tg) * vis[..., None])
        value /= n_vis
        g = np.concatenate(grads, axis=-1).reshape(n, -1) / n_vis
    else:
        mask = np.repeat(vis, model.head.per_keypoint(model.dims), axis=1).reshape(n, -1)
        diff = (logits - targets) * mask
        value = float(np.mean(diff**2))
        g = 2.0 * diff / diff.size
    return value, g.T @ flat, g.sum(axis=0)


def train(model: ToyModel, data: list[SyntheticSample], cfg: TrainConfig) -> tuple[ToyModel, list[float]]:
    """Mini-batch SGD; returns the trained copy and the full-training-set loss after each epoch."""
    check_head_loss(model.head, cfg.loss)
    images, coords, visible = stack(data)
    targets = build_targets(model, coords, visible, cfg)
    model = model.copy()
    rng = substream(cfg.seed, "train/shuffle")
    n = len(images)
    curve = []
    for _ in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            _, gw, gb = loss_and_grad(model, images[idx], targets[idx], visible[idx], cfg.loss)
            model.weights -= cfg.learning_rate * gw
            model.biases -= cfg.learning_rate * gb
        curve.append(loss_and_grad(model, images, targets, visible, cfg.loss)[0])
    return model, curve


# --- evaluation -----------------------------------------------------------

def predict(model: ToyModel, images: np.ndarray, shift: bool = True) -> np.ndarray:
    """Decoded ``(N, n_kp, 3)`` array of ``x, y, confidence``."""
    n = len(images)
    out = split_logits(model, forward_batch(model, images))
    if model.head.kind == "simdr":
        lx, ly = out
        dec = decode_simdr_batch(lx.reshape(n * model.n_keypoints, -1), ly.reshape(n * model.n_keypoints, -1),
                                 model.head.k)
    else:
        dec = decode_heatmap_batch(out.reshape(n * model.n_keypoints, *out.shape[2:]), model.head.lam, shift)
    return dec.reshape(n, model.n_keypoints, 3)


def score(pred_xy: np.ndarray, data: list[SyntheticSample]) -> dict:
    """Metric report for decoded ``(N, n_kp, >=2)`` predictions against the samples' poses."""
    _, coords, visible = stack(data)
    dist = np.linalg.norm(pred_xy[..., :2] - coords, axis=-1)
    oks_vals = []
    for s, d in zip(data, dist):
        vis = np.array([k.visible for k in s.gt.keypoints])
        c = np.array(s.gt.per_type_constants)
        oks_vals.append(float(np.exp(-d[vis] ** 2 / (2 * s.gt.object_scale**2 * c[vis] ** 2)).mean()))
    ap = average_precision(MatchResult(oks_vals, AP_THRESHOLDS))
    refs = np.repeat([[s.gt.object_scale] for s in data], coords.shape[1], axis=1)
    return {
        "ap": ap["ap"],
        "ar": ap["ar"],
        "ap50": ap["per_threshold"][0],
        "ap75": ap["per_threshold"][AP_THRESHOLDS.index(0.75)],
        "pckh@0.1": pckh(dist[visible], refs[visible], 0.1),
        "pckh@0.5": pckh(dist[visible], refs[visible], 0.5),
        "mean_px_error": float(dist[visible].mean()),
    }


def evaluate(model: ToyModel, data: list[SyntheticSample]) -> dict:
    """Metrics with the head's decoder (quarter-cell shift for heatmaps).

    Heatmap reports also carry ``mean_px_error_plain`` from the unshifted decode.
    """
    images, _, _ = stack(data)
    report = score(predict(model, images, shift=True), data)
    if model.head.kind == "heatmap":
        report["mean_px_error_plain"] = score(predict(model, images, shift=False), data)["mean_px_error"]
    else:
        report["mean_px_error_plain"] = report["mean_px_error"]
    return report
