"""OKS, single-instance AP/AR over OKS thresholds, PCKh and mean pixel error."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .core import Pose

AP_THRESHOLDS = tuple(round(0.50 + 0.05 * i, 2) for i in range(10))
REPORT_FIELDS = ["ap", "ar", "ap50", "ap75", "pckh@0.1", "pckh@0.5", "mean_px_error"]


class UndefinedMetricError(ValueError):
    pass


@dataclass(frozen=True)
class MatchResult:
    per_sample_oks: tuple[float, ...]
    thresholds: tuple[float, ...] = field(default=AP_THRESHOLDS)

    def __post_init__(self):
        object.__setattr__(self, "per_sample_oks", tuple(float(o) for o in self.per_sample_oks))
        th = tuple(self.thresholds)
        object.__setattr__(self, "thresholds", th)
        if any(not 0 < t < 1 for t in th) or any(b <= a for a, b in zip(th, th[1:])):
            raise ValueError("thresholds must be strictly increasing inside (0, 1)")


def oks_arrays(pred_xy, gt_xy, visible, scale, consts) -> float:
    """OKS from raw arrays: ``pred_xy``/``gt_xy`` are ``(n, 2)``."""
    pred_xy = np.asarray(pred_xy, dtype=float)
    gt_xy = np.asarray(gt_xy, dtype=float)
    if pred_xy.shape != gt_xy.shape:
        raise ValueError("poses must have the same number of keypoints")
    vis = np.asarray(visible, dtype=bool)
    if not vis.any():
        raise UndefinedMetricError("OKS is undefined without visible ground-truth keypoints")
    d2 = np.sum((pred_xy - gt_xy) ** 2, axis=-1)
    consts = np.asarray(consts, dtype=float)
    sim = np.exp(-d2 / (2 * scale**2 * consts**2))
    return float(sim[vis].sum() / vis.sum())


def oks(pred: Pose, gt: Pose) -> float:
    """Keypoint similarity with ``gt``'s scale, constants and visibility."""
    if len(pred.keypoints) != len(gt.keypoints):
        raise ValueError("poses must have the same number of keypoints")
    return oks_arrays(
        [(k.x, k.y) for k in pred.keypoints],
        [(k.x, k.y) for k in gt.keypoints],
        [k.visible for k in gt.keypoints],
        gt.object_scale,
        gt.per_type_constants,
    )


def average_precision(results: MatchResult) -> dict:
    scores = np.asarray(results.per_sample_oks, dtype=float)
    if scores.size == 0:
        raise ValueError("no samples to aggregate")
    per_threshold = [float(np.mean(scores >= t)) for t in results.thresholds]
    ap = float(np.mean(per_threshold))
    # one prediction per ground truth: precision and recall coincide
    return {"ap": ap, "ar": ap, "per_threshold": per_threshold}


def pckh(errors, ref_lengths, alpha: float) -> float:
    errors = np.asarray(errors, dtype=float)
    ref = np.asarray(ref_lengths, dtype=float)
    if errors.shape != ref.shape:
        raise ValueError("errors and ref_lengths differ in length")
    if np.any(ref <= 0) or alpha <= 0:
        raise ValueError("reference lengths and alpha must be positive")
    if errors.size == 0:
        raise ValueError("no errors to score")
    return float(np.mean(errors <= alpha * ref))


def mean_px_error(preds, gts) -> float:
    """Mean Euclidean distance; ``preds``/``gts`` are keypoint-like objects or ``(N, 2)`` arrays."""
    p = _xy(preds)
    g = _xy(gts)
    if p.shape != g.shape:
        raise ValueError("preds and gts differ in length")
    return float(np.mean(np.linalg.norm(p - g, axis=-1)))


def _xy(items) -> np.ndarray:
    if isinstance(items, np.ndarray):
        return items[..., :2].astype(float)
    return np.array([(it.x, it.y) for it in items], dtype=float).reshape(-1, 2)


def format_report(rows: list[dict], fmt: str) -> str:
    """Flat records as CSV (header from the first row) or a JSON list of objects."""
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
