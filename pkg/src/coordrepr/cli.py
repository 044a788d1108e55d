"""Command-line front end.

Every command is fully determined by its flags. Outputs go to ``--out`` (stdout
by default); relative output paths are resolved under ``$COORDREPR_OUTPUT_DIR``
when that variable is set.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from pathlib import Path

from .core import ImageDims
from .experiments import ToyExperiment, compare, sweep_k
from .metrics import format_report
from .quantization import (
    audit_roundtrip,
    heatmap,
    heatmap_error_bound,
    representation_cost,
    simdr,
    simdr_error_bound,
    stats_to_csv,
)
from .records import FormatError, load_dataset, load_model, save_dataset, save_model
from .toymodel import Head, TrainConfig, child_seed, default_loss, evaluate, gen_dataset, init_model, train

OUTPUT_DIR_ENV = "COORDREPR_OUTPUT_DIR"


class CommandFailed(Exception):
    pass


def int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def dims_arg(text: str) -> ImageDims:
    try:
        return ImageDims.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def dims_list(text: str) -> list[ImageDims]:
    return [dims_arg(t) for t in text.split(",") if t.strip()]


def resolve_out(path: str | None) -> Path | None:
    if path in (None, "-"):
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def emit(text: str, out: str | None) -> None:
    p = resolve_out(out)
    if p is None:
        sys.stdout.write(text)
    else:
        p.write_text(text)


def render(rows: list[dict], fmt: str) -> str:
    return format_report(rows, fmt)


# --- commands -------------------------------------------------------------

def cmd_bounds(args) -> None:
    cost = representation_cost(args.dims, args.k, args.lam)
    common = {"k": args.k, "lambda": args.lam, "width": args.dims.width, "height": args.dims.height}
    rows = [
        {"quantity": "quantisation_error_bound", "simdr": simdr_error_bound(args.k),
         "heatmap": heatmap_error_bound(args.lam), **common},
        {"quantity": "representation_elements", "simdr": cost.simdr_elements,
         "heatmap": cost.heatmap_elements, **common},
    ]
    emit(render(rows, args.format), args.out)


def cmd_audit(args) -> None:
    params = args.k if args.scheme == "simdr" else args.lam
    make = simdr if args.scheme == "simdr" else heatmap
    stats = [
        audit_roundtrip(make(p), d, args.n, args.seed, edge_inclusive=args.edge_inclusive, workers=args.workers)
        for d in args.dims for p in params
    ]
    if args.format == "json":
        text = render([s.as_row() for s in stats], "json")
    else:
        text = stats_to_csv(stats)
    emit(text, args.out)
    bad = [s for s in stats if not s.within_bound]
    if bad:
        raise CommandFailed(
            "; ".join(f"{s.scheme.name}({s.scheme.param}) {s.dims}: max_err {s.max_err} > bound {s.bound}" for s in bad)
        )


def experiment_from(args) -> ToyExperiment:
    return ToyExperiment(
        dims=args.dims, n_train=args.n_train, n_test=args.n_test, n_keypoints=args.n_keypoints,
        blob_sigma=args.blob_sigma, noise=args.noise, seed=args.seed,
        train=TrainConfig(learning_rate=args.lr, epochs=args.epochs, batch_size=args.batch_size,
                          epsilon=args.epsilon),
    )


def cmd_sweep_k(args) -> None:
    rows = sweep_k(experiment_from(args), args.k, loss=args.loss)
    emit(render(rows, args.format), args.out)


def cmd_compare(args) -> None:
    rows = compare(experiment_from(args), k=args.k, lam=args.lam, sigma=args.sigma, simdr_loss=args.loss)
    emit(render(rows, args.format), args.out)


def cmd_gen(args) -> None:
    data = gen_dataset(args.n, args.dims, args.n_keypoints, args.blob_sigma, args.noise,
                       seed=child_seed(args.seed, "gen/" + args.split))
    save_dataset(resolve_out(args.out), data)


def head_from(args) -> Head:
    if args.head == "simdr":
        return Head("simdr", k=args.k)
    return Head("heatmap", lam=args.lam, sigma=args.sigma)


def cmd_train(args) -> None:
    data = load_dataset(args.data)
    head = head_from(args)
    dims = ImageDims(data[0].image.shape[1], data[0].image.shape[0])
    cfg = TrainConfig(learning_rate=args.lr, epochs=args.epochs, batch_size=args.batch_size, seed=args.seed,
                      loss=args.loss or default_loss(head), epsilon=args.epsilon)
    model, curve = train(init_model(dims, head, len(data[0].gt.keypoints)), data, cfg)
    save_model(resolve_out(args.out), model)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["epoch", "loss"])
    writer.writerows((i + 1, repr(v)) for i, v in enumerate(curve))
    emit(buf.getvalue(), args.curve or str(args.out) + ".loss.csv")


def cmd_eval(args) -> None:
    model = load_model(args.model)
    data = load_dataset(args.data)
    report = evaluate(model, data)
    emit(render([{"scheme": model.head.kind, **report}], args.format), args.out)


# --- parser ---------------------------------------------------------------

def _fmt(p):
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")


def _toy(p):
    p.add_argument("--dims", type=dims_arg, default=ImageDims(16, 16), help="HxW")
    p.add_argument("--n-train", type=int, default=5000)
    p.add_argument("--n-test", type=int, default=1000)
    p.add_argument("--n-keypoints", type=int, default=1)
    p.add_argument("--blob-sigma", type=float, default=1.5)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--epsilon", type=float, default=0.1, help="label smoothing")
    p.add_argument("--loss", choices=["ce", "kl"], default="ce", help="loss for the 1D head")
    p.add_argument("--seed", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coordrepr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="analytic error bounds and element counts")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--lambda", dest="lam", type=int, default=4)
    p.add_argument("--dims", type=dims_arg, default=ImageDims(192, 256), help="HxW")
    _fmt(p)
    p.set_defaults(fn=cmd_bounds)

    p = sub.add_parser("audit", help="Monte-Carlo encode/decode roundtrip audit")
    p.add_argument("--scheme", choices=["simdr", "heatmap"], required=True)
    p.add_argument("--k", type=int_list, default=[2])
    p.add_argument("--lambda", dest="lam", type=int_list, default=[4])
    p.add_argument("--dims", type=dims_list, default=[ImageDims(192, 256)], help="HxW[,HxW...]")
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--edge-inclusive", action="store_true", help="sample up to the image edge")
    p.add_argument("--workers", type=int, default=1)
    _fmt(p)
    p.set_defaults(fn=cmd_audit)

    p = sub.add_parser("sweep-k", help="toy experiment for each splitting factor")
    _toy(p)
    p.add_argument("--k", type=int_list, default=[1, 2, 3, 4])
    _fmt(p)
    p.set_defaults(fn=cmd_sweep_k)

    p = sub.add_parser("compare", help="train both heads on the same data and seed")
    _toy(p)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--lambda", dest="lam", type=int, default=4)
    p.add_argument("--sigma", type=float, default=None, help="heatmap sigma in cells")
    _fmt(p)
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("gen", help="write a synthetic dataset file")
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--dims", type=dims_arg, default=ImageDims(16, 16), help="HxW")
    p.add_argument("--n-keypoints", type=int, default=1)
    p.add_argument("--blob-sigma", type=float, default=1.5)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--split", default="train", help="name of the seed sub-stream (train/test)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("train", help="train a toy model on a dataset file")
    p.add_argument("--data", required=True)
    p.add_argument("--head", choices=["simdr", "heatmap"], default="simdr")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--lambda", dest="lam", type=int, default=4)
    p.add_argument("--sigma", type=float, default=2.0, help="heatmap sigma in cells")
    p.add_argument("--loss", choices=["ce", "kl", "mse"], default=None)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True, help="model file")
    p.add_argument("--curve", default=None, help="loss-curve CSV (default: <out>.loss.csv)")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model file on a dataset file")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    _fmt(p)
    p.set_defaults(fn=cmd_eval)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.fn(args)
    except CommandFailed as e:
        print(f"check failed: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e.filename}: no such file", file=sys.stderr)
        return 2
    except (FormatError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
