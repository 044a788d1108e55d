"""Splitting-factor sweep on the toy problem, optionally at several input sizes."""

import argparse
from dataclasses import replace

from coordrepr.core import ImageDims
from coordrepr.experiments import ToyExperiment, sweep_k
from coordrepr.metrics import format_report

parser = argparse.ArgumentParser()
parser.add_argument("--dims", nargs="+", default=["16x16"])
parser.add_argument("--k", type=int, nargs="+", default=[1, 2, 3, 4])
parser.add_argument("--epochs", type=int, default=50)
args = parser.parse_args()

rows = []
for d in args.dims:
    base = ToyExperiment(dims=ImageDims.parse(d))
    exp = replace(base, train=replace(base.train, epochs=args.epochs))
    rows += [{"dims": d, **r} for r in sweep_k(exp, args.k)]
print(format_report(rows, "csv"), end="")
