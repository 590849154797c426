#!/usr/bin/env python3
"""Render contour plots from hjsolve grid CSVs.

Usage:
    tools/plot_grid.py out_t0.csv [out_t1.csv ...] [--save DIR]

Each input is one `<stem>_t<i>.csv` file written by a grid query
(`coord1,coord2,t,value[,branch]`).  With --save the figures land in DIR as
PNGs named after the inputs; otherwise an interactive window opens per file.
"""

import argparse
import csv
import math
import pathlib
import sys


def load(path):
    xs, ys, vs, t = [], [], [], None
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if len(header) < 4 or header[3] != "value":
            sys.exit(f"{path}: not a grid CSV (header {header!r})")
        for row in reader:
            xs.append(float(row[0]))
            ys.append(float(row[1]))
            vs.append(float(row[3]))
            t = float(row[2])
    nx = len(sorted(set(xs)))
    ny = len(sorted(set(ys)))
    if nx * ny != len(vs):
        sys.exit(f"{path}: {len(vs)} rows do not fill a {nx} x {ny} grid")
    return xs, ys, vs, t, nx, ny


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csvs", nargs="+")
    ap.add_argument("--save", metavar="DIR", help="write PNGs instead of showing windows")
    ap.add_argument("--levels", type=int, default=30)
    args = ap.parse_args()

    try:
        import matplotlib

        if args.save:
            matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        sys.exit("matplotlib is required: pip install matplotlib")

    for name in args.csvs:
        xs, ys, vs, t, nx, ny = load(name)
        xu = sorted(set(xs))
        yu = sorted(set(ys))
        grid = [[math.nan] * nx for _ in range(ny)]
        xi = {v: i for i, v in enumerate(xu)}
        yi = {v: i for i, v in enumerate(yu)}
        for x, y, v in zip(xs, ys, vs):
            grid[yi[y]][xi[x]] = v

        fig, ax = plt.subplots(figsize=(5.2, 4.4))
        cs = ax.contour(xu, yu, grid, levels=args.levels, linewidths=0.7)
        ax.clabel(cs, inline=True, fontsize=6)
        ax.set_xlabel("coord1")
        ax.set_ylabel("coord2")
        ax.set_title(f"{pathlib.Path(name).stem}  (t = {t:g})")
        fig.tight_layout()
        if args.save:
            out = pathlib.Path(args.save) / (pathlib.Path(name).stem + ".png")
            out.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(out, dpi=150)
            print(f"wrote {out}")
            plt.close(fig)
        else:
            plt.show()


if __name__ == "__main__":
    main()
