#!/usr/bin/env python3
"""Quick plots of CSV files written by the lpgeom CLI.

    python3 tools/plot.py out/polar.csv      # boundary curves per p
    python3 tools/plot.py out/ratio.csv      # M_p(B_1^n) / M_p(B_inf^n) against p
    python3 tools/plot.py out/steiner.csv    # Hausdorff distance and polar volumes

The figure is written next to the CSV with a .png suffix unless -o is given.
"""

import argparse
import csv
import math
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def plot_polar(rows, ax):
    # near unbounded directions radii blow up; clip the view to a robust range
    curves, closed, radii = {}, {}, []
    for r in rows:
        ok = r["bounded"] == "1"
        closed[r["p"]] = closed.get(r["p"], True) and ok
        if ok:
            curves.setdefault(r["p"], []).append((float(r["x1"]), float(r["x2"])))
            radii.append(float(r["radius"]))
    for p, pts in curves.items():
        if closed[p]:
            pts = pts + pts[:1]
        xs, ys = zip(*pts)
        ax.plot(xs, ys, label=f"p = {p}")
    radii.sort()
    lim = 1.5 * radii[len(radii) // 2] if radii else 1.0
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_aspect("equal")
    ax.legend()


def plot_ratio(rows, ax):
    ps = [float(r["p"]) for r in rows]
    ax.plot(ps, [float(r["ratio"]) for r in rows], marker=".")
    ax.axhline(1.0, color="grey", lw=0.5)
    ax.set_xlabel("p")
    ax.set_ylabel("ratio")


def plot_steiner(rows, ax):
    it = [int(r["iteration"]) for r in rows]
    ax.semilogy(it, [float(r["hausdorff"]) for r in rows], label="Hausdorff distance")
    ax.set_xlabel("iteration")
    twin = ax.twinx()
    for key in rows[0]:
        if key.startswith("polar_volume_"):
            vals = [float(r[key]) for r in rows]
            if all(math.isfinite(v) for v in vals):
                twin.plot(it, vals, ls="--", label=key)
    ax.legend(loc="upper left")
    twin.legend(loc="upper right")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("csv", type=pathlib.Path)
    ap.add_argument("-o", "--out", type=pathlib.Path)
    args = ap.parse_args()
    rows = read(args.csv)
    if not rows:
        raise SystemExit(f"{args.csv}: no rows")
    kinds = {"polar": plot_polar, "ratio": plot_ratio, "steiner": plot_steiner}
    kind = args.csv.stem
    if kind not in kinds:
        raise SystemExit(f"don't know how to plot {args.csv.name}; expected one of {sorted(kinds)}")
    fig, ax = plt.subplots(figsize=(6, 5))
    kinds[kind](rows, ax)
    ax.set_title(args.csv.name)
    out = args.out or args.csv.with_suffix(".png")
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
