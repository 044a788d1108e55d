"""Roundtrip audits over the k / lambda / input-size grid; CSV to stdout."""

import sys

from coordrepr.core import ImageDims
from coordrepr.quantization import audit_roundtrip, heatmap, simdr, stats_to_csv

DIMS = [ImageDims(64, 64), ImageDims(128, 128), ImageDims(192, 256)]

if __name__ == "__main__":
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000
    stats = [
        audit_roundtrip(scheme, dims, n, seed=0)
        for dims in DIMS
        for scheme in [simdr(k) for k in (1, 2, 3, 4)] + [heatmap(lam) for lam in (1, 2, 4)]
    ]
    sys.stdout.write(stats_to_csv(stats))
    sys.exit(0 if all(s.within_bound for s in stats) else 1)
