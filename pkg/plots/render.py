#!/usr/bin/env python3
"""Render an eigenvalue histogram CSV with a reference-density overlay.

Consumes the experiment runner's CSV interfaces only: a histogram file with
columns ``bin_left,bin_right,count,density`` and a curve file with columns
``x,density``.  Emits a fixed-size 1200x800 PNG with monochrome styling.

Usage:
    plots/render.py --hist FILE --curve FILE --out FILE [--title STR]
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

HIST_COLUMNS = ("bin_left", "bin_right", "count", "density")
CURVE_COLUMNS = ("x", "density")


class SchemaError(ValueError):
    pass


def _read_csv(path, expected_columns):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        for got, want in zip(header, expected_columns):
            if got != want:
                raise SchemaError(f"{path}: expected column {want!r}, found {got!r}")
        if len(header) != len(expected_columns):
            raise SchemaError(
                f"{path}: expected columns {','.join(expected_columns)}, got {','.join(header)}"
            )
        try:
            rows = [[float(v) for v in row] for row in reader if row]
        except ValueError as exc:
            raise SchemaError(f"{path}: non-numeric cell ({exc})") from None
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return np.asarray(rows)


def load_histogram(path):
    data = _read_csv(path, HIST_COLUMNS)
    left, right, count, density = data.T
    if not np.any(count):
        raise SchemaError(f"{path}: histogram is empty (all counts zero)")
    return left, right, density


def load_curve(path):
    data = _read_csv(path, CURVE_COLUMNS)
    return data[:, 0], data[:, 1]


def l1_gap(hist_path, curve_path) -> float:
    """Integrated |histogram density - overlay density| across the bins."""
    left, right, density = load_histogram(hist_path)
    x, ref = load_curve(curve_path)
    centers = (left + right) / 2
    ref_at_centers = np.interp(centers, x, ref)
    return float(np.sum(np.abs(density - ref_at_centers) * (right - left)))


def render(hist_path, curve_path, out_path, title: str | None = None) -> None:
    left, right, density = load_histogram(hist_path)
    x, ref = load_curve(curve_path)

    fig, ax = plt.subplots(figsize=(12, 8), dpi=100)
    ax.bar(
        left,
        density,
        width=right - left,
        align="edge",
        color="0.75",
        edgecolor="0.4",
        linewidth=0.4,
    )
    ax.plot(x, ref, color="black", linewidth=1.6)
    lo = min(-2.5, float(left[0]))
    hi = max(2.5, float(right[-1]))
    ax.set_xlim(lo, hi)
    ax.set_ylim(bottom=0.0)
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, format="png")
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--hist", required=True, help="histogram CSV (bin_left,bin_right,count,density)")
    parser.add_argument("--curve", required=True, help="overlay curve CSV (x,density)")
    parser.add_argument("--out", required=True, help="output PNG path")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)
    try:
        render(args.hist, args.curve, args.out, args.title)
    except (SchemaError, OSError) as exc:
        print(f"render: {exc}", file=sys.stderr)
        Path(args.out).unlink(missing_ok=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
