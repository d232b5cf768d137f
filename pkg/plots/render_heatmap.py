#!/usr/bin/env python3
"""Phase-diagram heatmaps from sweep CSVs.

Reads a sweep CSV produced by `edgebudget sweep` over pow-specs, so the
grid coefficients are exponents: x = log_n t (column t_coeff) and
y = log_n b (column b_coeff).  Cell colour is the success rate.

An optional dashed overlay draws the theoretical budget threshold in
the same normalized coordinates:

  trees:k    y = max((k-2)(1-x), 0)
  cycles:k   y = max((k+2) - (k+1)x, 1 - x/2)

The tree family is indexed so that k=3 is the 4-vertex path, whose
threshold is the line y = 1 - x.  For cycles, k indexes the C_{2k+1} /
C_{2k+2} pair and the x axis is already the exponent of t, matching
the normalization used by the sweep grid.

Rendering is deterministic: no timestamps are embedded, so identical
CSV bytes and flags give identical image bytes.
"""

import argparse
import csv
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

REQUIRED_COLUMNS = ("t_coeff", "b_coeff", "rate")


def load_table(path):
    """Parse the sweep CSV into a list of dicts, skipping comment lines."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        rows = list(reader)
    if not rows:
        raise ValueError("empty sweep CSV")
    for column in REQUIRED_COLUMNS:
        if column not in rows[0]:
            raise ValueError(f"missing column: {column}")
    for row in rows:
        rate = float(row["rate"])
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"rate out of range: {rate}")
    return rows


def rate_grid(rows):
    """Pivot rows to (x values, y values, rate matrix[y][x])."""
    xs = sorted({float(r["t_coeff"]) for r in rows})
    ys = sorted({float(r["b_coeff"]) for r in rows})
    grid = np.full((len(ys), len(xs)), np.nan)
    xi = {v: i for i, v in enumerate(xs)}
    yi = {v: i for i, v in enumerate(ys)}
    for r in rows:
        grid[yi[float(r["b_coeff"])], xi[float(r["t_coeff"])]] = float(r["rate"])
    return xs, ys, grid


def overlay_curve(overlay, xs):
    kind, _, num = overlay.partition(":")
    if not num.isdigit():
        raise ValueError(f"bad overlay id: {overlay!r}")
    k = int(num)
    x = np.linspace(min(xs), max(xs), 200)
    if kind == "trees":
        return x, np.maximum((k - 2) * (1 - x), 0.0)
    if kind == "cycles":
        return x, np.maximum((k + 2) - (k + 1) * x, 1 - x / 2)
    raise ValueError(f"bad overlay id: {overlay!r}")


def render_heatmap(csv_path, overlay, out_path):
    """Render the heatmap, write the image, return the rate grid."""
    rows = load_table(csv_path)
    xs, ys, grid = rate_grid(rows)
    half_x = (xs[1] - xs[0]) / 2 if len(xs) > 1 else 0.05
    half_y = (ys[1] - ys[0]) / 2 if len(ys) > 1 else 0.05
    extent = (xs[0] - half_x, xs[-1] + half_x, ys[0] - half_y, ys[-1] + half_y)

    fig, ax = plt.subplots(figsize=(6, 4.5))
    image = ax.imshow(
        grid,
        origin="lower",
        aspect="auto",
        extent=extent,
        vmin=0.0,
        vmax=1.0,
        cmap="viridis",
    )
    if overlay:
        x, y = overlay_curve(overlay, xs)
        keep = (y >= extent[2]) & (y <= extent[3])
        ax.plot(x[keep], y[keep], "w--", linewidth=1.5, label=overlay)
        ax.legend(loc="upper right")
    ax.set_xlabel(r"$\log_n t$")
    ax.set_ylabel(r"$\log_n b$")
    ax.set_title("success rate")
    fig.colorbar(image, ax=ax, label="rate")
    fig.savefig(out_path, dpi=150, metadata={"Software": None})
    plt.close(fig)
    return grid


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="Render a phase-diagram heatmap from a sweep CSV"
    )
    parser.add_argument("csv", help="sweep CSV path")
    parser.add_argument(
        "--overlay", help="theoretical threshold curve: trees:K or cycles:K"
    )
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        render_heatmap(args.csv, args.overlay, args.out)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
