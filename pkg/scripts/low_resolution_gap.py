"""Toy version of the low-resolution comparison: both heads, several seeds."""

import argparse

from coordrepr.experiments import ToyExperiment, compare

parser = argparse.ArgumentParser()
parser.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
parser.add_argument("--simdr-loss", choices=["ce", "kl"], default="ce")
args = parser.parse_args()

print("seed,simdr,heatmap_plain,heatmap_shifted,ratio_plain,ratio_shifted")
for seed in args.seeds:
    simdr_row, heat_row = compare(ToyExperiment(seed=seed), simdr_loss=args.simdr_loss)
    s, p, h = simdr_row["mean_px_error"], heat_row["mean_px_error_plain"], heat_row["mean_px_error"]
    print(f"{seed},{s:.4f},{p:.4f},{h:.4f},{s / p:.3f},{s / h:.3f}")
