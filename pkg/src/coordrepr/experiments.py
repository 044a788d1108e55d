"""Toy train/evaluate pipelines shared by the CLI, scripts and acceptance tests."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .core import ImageDims
from .quantization import simdr_error_bound
from .toymodel import Head, TrainConfig, child_seed, default_loss, evaluate, gen_dataset, init_model, train


@dataclass(frozen=True)
class ToyExperiment:
    dims: ImageDims = ImageDims(16, 16)
    n_train: int = 5000
    n_test: int = 1000
    n_keypoints: int = 1
    blob_sigma: float = 1.5
    noise: float = 0.05
    seed: int = 1
    train: TrainConfig = TrainConfig(learning_rate=0.5, epochs=50, batch_size=32)

    def datasets(self):
        kw = dict(dims=self.dims, n_keypoints=self.n_keypoints, blob_sigma=self.blob_sigma, noise=self.noise)
        return (gen_dataset(self.n_train, seed=child_seed(self.seed, "gen/train"), **kw),
                gen_dataset(self.n_test, seed=child_seed(self.seed, "gen/test"), **kw))


def run_head(exp: ToyExperiment, head: Head, train_data, test_data, loss: str | None = None):
    cfg = replace(exp.train, seed=exp.seed, loss=loss or default_loss(head))
    model, curve = train(init_model(exp.dims, head, exp.n_keypoints), train_data, cfg)
    return model, curve, evaluate(model, test_data)


def compare(exp: ToyExperiment, k: int = 2, lam: int = 4, sigma: float | None = None,
            simdr_loss: str = "ce") -> list[dict]:
    """Train both heads on the same data and seed; one report row per head."""
    train_data, test_data = exp.datasets()
    heads = [(Head("simdr", k=k), simdr_loss),
             (Head("heatmap", lam=lam) if sigma is None else Head("heatmap", lam=lam, sigma=sigma), "mse")]
    rows = []
    for head, loss in heads:
        _, curve, report = run_head(exp, head, train_data, test_data, loss)
        param = head.k if head.kind == "simdr" else head.lam
        rows.append({"scheme": head.kind, "param": param, **report, "final_train_loss": curve[-1] if curve else float("nan")})
    return rows


def sweep_k(exp: ToyExperiment, ks: list[int], loss: str = "ce") -> list[dict]:
    if not ks:
        raise ValueError("k list is empty")
    train_data, test_data = exp.datasets()
    rows = []
    for k in ks:
        _, _, report = run_head(exp, Head("simdr", k=k), train_data, test_data, loss)
        rows.append({
            "k": k,
            "mean_px_error": report["mean_px_error"],
            "pckh@0.1": report["pckh@0.1"],
            "oks_ap": report["ap"],
            "quant_floor": simdr_error_bound(k),
        })
    return rows
