"""Training objectives with analytic gradients and a central-difference checker.

Class-probability losses act on the last axis. For stacked inputs the value is
the sum over rows; callers choose the reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class LossValue:
    value: float
    grad: np.ndarray


def _pair(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a, b


def log_softmax(logits) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    z = z - z.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def softmax(logits) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    if z.shape[-1] == 0:
        raise ValueError("softmax of an empty vector")
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(logits, target) -> LossValue:
    logits, target = _pair(logits, target)
    value = -np.sum(target * log_softmax(logits))
    return LossValue(float(value), softmax(logits) - target)


def entropy(p) -> float:
    p = np.asarray(p, dtype=float)
    nz = p > 0
    return float(-np.sum(p[nz] * np.log(p[nz])))


def kl_divergence(logits, target) -> LossValue:
    """KL(target || softmax(logits)); bins with zero target mass contribute nothing."""
    logits, target = _pair(logits, target)
    logp = log_softmax(logits)
    nz = target > 0
    value = np.sum(target[nz] * (np.log(target[nz]) - logp[nz]))
    return LossValue(float(value), softmax(logits) - target)


def mse(pred, target) -> LossValue:
    pred, target = _pair(pred, target)
    diff = pred - target
    return LossValue(float(np.mean(diff**2)), 2.0 * diff / diff.size)


LOSSES: dict[str, Callable[..., LossValue]] = {
    "ce": cross_entropy,
    "kl": kl_divergence,
    "mse": mse,
}


def grad_check(loss, point, target, h: float = 1e-5) -> float:
    """Max over coordinates of ``|fd - analytic| / max(1, |analytic|)``."""
    fn = LOSSES[loss] if isinstance(loss, str) else loss
    x = np.array(point, dtype=float)
    analytic = fn(x, target).grad
    flat = x.reshape(-1)
    worst = 0.0
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        up = fn(x, target).value
        flat[i] = orig - h
        down = fn(x, target).value
        flat[i] = orig
        fd = (up - down) / (2 * h)
        a = analytic.reshape(-1)[i]
        worst = max(worst, abs(fd - a) / max(1.0, abs(a)))
    return worst
