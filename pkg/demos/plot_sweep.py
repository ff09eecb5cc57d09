"""Optional plotting helper: render a sweep CSV produced by `rispair sweep`.

Usage:
    python demos/plot_sweep.py results.csv [output.png]

Draws sum rate against the sweep variable, one line per (scheme, method).
Requires matplotlib, which the core package does not depend on.
"""
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main(argv):
    if not 2 <= len(argv) <= 3:
        print(__doc__)
        return 2
    path = argv[1]
    out = argv[2] if len(argv) == 3 else path.rsplit(".", 1)[0] + ".png"
    curves = defaultdict(list)
    sweep_var = "value"
    with open(path) as fh:
        for row in csv.DictReader(fh):
            sweep_var = row["sweep_var"]
            value, total = float(row["value"]), float(row["sum_rate"])
            curves[(row["scheme"], row["method"])].append((value, total))
    fig, ax = plt.subplots(figsize=(6, 4))
    for (scheme, method), points in sorted(curves.items()):
        points.sort()
        style = "--" if method == "monte_carlo" else "-"
        ax.plot(*zip(*points), style, marker="o", label=f"{scheme} ({method})")
    ax.set_xlabel(sweep_var)
    ax.set_ylabel("sum rate (bits/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
