#!/usr/bin/env python3
"""Render figures from a simulation run directory.

Reads only the documented CSV layouts written by the simulator:

    paths.csv      t,region,particle_id,position   (absorbed sample paths)
    snapshots.csv  t,region,bin_lo,bin_hi,count    (alive-density heatmap)
    lambda.csv     t,kind,L_0..                    (drift trajectories)
    defaults.csv   region,particle_id,default_time (jump markers on drift)
    drift_overlay.csv  t,coupled_L_*,decoupled_L_* (coupled-vs-decoupled)

Usage: plot.py --run <dir> --kind {paths|density|drift|overlay} --out <file.png>

Never writes into the run directory; re-rendering produces identical bytes.
"""

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

REGION_COLORS = ("tab:blue", "tab:red", "tab:green", "tab:purple")


def fail(message: str) -> None:
    print(f"plot.py: {message}", file=sys.stderr)
    sys.exit(1)


def load_csv(run_dir: Path, name: str, required: list[str]) -> pd.DataFrame:
    path = run_dir / name
    if not path.exists():
        fail(f"{path} is missing")
    try:
        frame = pd.read_csv(path)
    except Exception as exc:
        fail(f"{path} is unreadable: {exc}")
    for column in required:
        if column not in frame.columns:
            fail(f"{path} is missing column {column!r}")
    return frame


def drift_columns(frame: pd.DataFrame, prefix: str, path: Path,
                  expected: int | None = None) -> list[str]:
    cols = sorted((c for c in frame.columns if c.startswith(prefix)),
                  key=lambda c: int(c[len(prefix):]))
    if not cols:
        fail(f"{path} is missing column {prefix + '0'!r}")
    if expected is not None:
        for r in range(expected):
            if f"{prefix}{r}" not in cols:
                fail(f"{path} is missing column {prefix + str(r)!r}")
    return cols


def region_count(run_dir: Path) -> int | None:
    """Region count from the run manifest, when one is present."""
    manifest = run_dir / "manifest.json"
    if not manifest.exists():
        return None
    try:
        import json
        return len(json.loads(manifest.read_text())["config"]["K"])
    except Exception:
        return None


def render_paths(run_dir: Path, ax) -> None:
    frame = load_csv(run_dir, "paths.csv",
                     ["t", "region", "particle_id", "position"])
    for (region, particle), group in frame.groupby(["region", "particle_id"]):
        color = REGION_COLORS[int(region) % len(REGION_COLORS)]
        ax.plot(group["t"], group["position"], lw=0.9, color=color, alpha=0.85)
    ax.axhline(0.0, color="black", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel("position")
    ax.set_title("absorbed sample paths (one line per particle)")


def render_density(run_dir: Path, ax_list, cmap: str) -> None:
    frame = load_csv(run_dir, "snapshots.csv",
                     ["t", "region", "bin_lo", "bin_hi", "count"])
    if frame.empty:
        fail("snapshots.csv holds no rows; re-run with snapshot_times set")
    regions = sorted(frame["region"].unique())
    for ax, region in zip(ax_list, regions):
        sub = frame[frame["region"] == region]
        times = np.sort(sub["t"].unique())
        lows = np.sort(sub["bin_lo"].unique())
        grid = np.zeros((lows.size, times.size))
        t_index = {t: j for j, t in enumerate(times)}
        b_index = {b: i for i, b in enumerate(lows)}
        for row in sub.itertuples():
            grid[b_index[row.bin_lo], t_index[row.t]] = row.count
        mesh_t = np.append(times, times[-1] + (times[-1] - times[0]) / max(len(times) - 1, 1))
        mesh_b = np.append(lows, sub["bin_hi"].max())
        ax.pcolormesh(mesh_t, mesh_b, grid, cmap=cmap, shading="flat")
        ax.set_ylabel(f"region {region}")
        ax.set_xlabel("t")
    ax_list[0].set_title("alive-particle density over time")


def render_drift(run_dir: Path, ax) -> None:
    frame = load_csv(run_dir, "lambda.csv", ["t", "kind"])
    cols = drift_columns(frame, "L_", run_dir / "lambda.csv",
                         expected=region_count(run_dir))
    grid = frame[frame["kind"] == "grid"]
    for col in cols:
        ax.step(grid["t"], grid[col], where="post",
                label=col, lw=1.2,
                color=REGION_COLORS[int(col[2:]) % len(REGION_COLORS)])
    defaults = load_csv(run_dir, "defaults.csv",
                        ["region", "particle_id", "default_time"])
    if not defaults.empty:
        ax.plot(defaults["default_time"],
                np.full(len(defaults), float(grid[cols[0]].min())),
                "|", color="gray", ms=6, label="defaults")
    ax.set_xlabel("t")
    ax.set_ylabel("drift")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("interaction terms")


def render_overlay(run_dir: Path, ax) -> None:
    path = run_dir / "drift_overlay.csv"
    frame = load_csv(run_dir, "drift_overlay.csv", ["t"])
    coupled = drift_columns(frame, "coupled_L_", path)
    decoupled = drift_columns(frame, "decoupled_L_", path,
                              expected=len(coupled))
    coupled = drift_columns(frame, "coupled_L_", path, expected=len(decoupled))
    for col in coupled:
        r = int(col.split("_")[-1])
        ax.plot(frame["t"], frame[col], lw=1.3, label=col,
                color=REGION_COLORS[r % len(REGION_COLORS)])
    for col in decoupled:
        r = int(col.split("_")[-1])
        ax.plot(frame["t"], frame[col], lw=1.1, ls="--", label=col,
                color=REGION_COLORS[r % len(REGION_COLORS)])
    ax.set_xlabel("t")
    ax.set_ylabel("drift")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("coupled (solid) vs decoupled (dashed) interaction terms")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--run", required=True, help="run directory")
    parser.add_argument("--kind", required=True,
                        choices=("paths", "density", "drift", "overlay"))
    parser.add_argument("--out", required=True, help="output image file")
    parser.add_argument("--cmap", default="viridis")
    parser.add_argument("--time-range", default=None,
                        help="lo,hi clip for the time axis")
    parser.add_argument("--dpi", type=int, default=130)
    args = parser.parse_args(argv)
    run_dir = Path(args.run)
    if not run_dir.is_dir():
        fail(f"{run_dir} is not a directory")

    if args.kind == "density":
        fig, axes = plt.subplots(2, 1, figsize=(7.2, 5.4), sharex=True)
        render_density(run_dir, list(np.atleast_1d(axes)), args.cmap)
        ax0 = np.atleast_1d(axes)[0]
    else:
        fig, ax0 = plt.subplots(figsize=(7.2, 4.2))
        {"paths": render_paths, "drift": render_drift,
         "overlay": render_overlay}[args.kind](run_dir, ax0)

    if args.time_range:
        lo, hi = (float(x) for x in args.time_range.split(","))
        for ax in fig.axes:
            ax.set_xlim(lo, hi)
    fig.tight_layout()
    fig.savefig(args.out, dpi=args.dpi, metadata={"Software": "plot.py"})
    plt.close(fig)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
