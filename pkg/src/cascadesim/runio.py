"""Run directory layout: CSV payloads plus a JSON manifest.

Every run directory holds

    lambda.csv     t,kind,L_0..L_{M-1}; one "grid" row per grid time and one
                   "prejump" row per cascade with the left-limit values
    defaults.csv   region,particle_id,default_time
    snapshots.csv  t,region,bin_lo,bin_hi,count
    jumps.csv      t,steps plus jump_r,triggers_r,defaults_r per region
    manifest.json  config echo, seed, scheme, versions, totals, sha256 of
                   every CSV, wall-clock bounds
    paths.csv      (record_paths only) t,region,particle_id,position up to
                   and including the absorption time
    measures.npz   (record_paths only) per-jump pre-jump sorted measures

Floats are printed with 17 significant digits, which round-trips float64
exactly; re-running a manifest's config and seed reproduces every CSV byte
for byte.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import DriftPath, JumpEvent, SimulationConfig, SimulationResult
from .errors import ConfigurationError


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_lambda(result: SimulationResult, path: Path) -> None:
    m = result.config.n_regions
    header = "t,kind," + ",".join(f"L_{r}" for r in range(m))
    jumps_at = {round(ev.time / result.config.dt): ev
                for ev in result.drift.jumps}
    lines = [header]
    for j, t in enumerate(result.drift.times):
        ev = jumps_at.get(j)
        if ev is not None:
            lines.append(",".join([fmt(t), "prejump"] +
                                  [fmt(x) for x in ev.pre_drift]))
        lines.append(",".join([fmt(t), "grid"] +
                              [fmt(x) for x in result.drift.values[j]]))
    path.write_text("\n".join(lines) + "\n")


def _write_defaults(result: SimulationResult, path: Path) -> None:
    lines = ["region,particle_id,default_time"]
    for r, times in enumerate(result.default_times):
        for i in np.flatnonzero(~np.isnan(times)):
            lines.append(f"{r},{i},{fmt(times[i])}")
    path.write_text("\n".join(lines) + "\n")


def _write_snapshots(result: SimulationResult, path: Path) -> None:
    lines = ["t,region,bin_lo,bin_hi,count"]
    for rec in result.snapshots:
        for b in range(rec.counts.size):
            lines.append(",".join([fmt(rec.time), str(rec.region),
                                   fmt(rec.bin_edges[b]),
                                   fmt(rec.bin_edges[b + 1]),
                                   str(int(rec.counts[b]))]))
    path.write_text("\n".join(lines) + "\n")


def _write_jumps(result: SimulationResult, path: Path) -> None:
    m = result.config.n_regions
    cols = ["t", "steps"]
    for r in range(m):
        cols += [f"jump_{r}", f"triggers_{r}", f"defaults_{r}"]
    lines = [",".join(cols)]
    for ev in result.drift.jumps:
        row = [fmt(ev.time), str(ev.steps)]
        for r in range(m):
            row += [fmt(ev.jump[r]), str(ev.triggers[r]), str(ev.defaults[r])]
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def _write_paths(result: SimulationResult, path: Path) -> None:
    lines = ["t,region,particle_id,position"]
    paths = result.particle_paths
    times = result.drift.times
    dt = result.config.dt
    for r in range(result.config.n_regions):
        d_times = result.default_times[r]
        for i in range(result.config.n_particles):
            stop = len(times) - 1 if np.isnan(d_times[i]) \
                else int(round(d_times[i] / dt))
            for j in range(stop + 1):
                lines.append(f"{fmt(times[j])},{r},{i},{fmt(paths[j, r, i])}")
    path.write_text("\n".join(lines) + "\n")


def write_run(result: SimulationResult, out_dir) -> dict:
    """Persist one result; returns the manifest that was written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()
    _write_lambda(result, out / "lambda.csv")
    _write_defaults(result, out / "defaults.csv")
    _write_snapshots(result, out / "snapshots.csv")
    _write_jumps(result, out / "jumps.csv")
    files = ["lambda.csv", "defaults.csv", "snapshots.csv", "jumps.csv"]
    if result.config.record_paths:
        _write_paths(result, out / "paths.csv")
        files.append("paths.csv")
        arrays = {}
        for k, ev in enumerate(result.drift.jumps):
            for r, measure in enumerate(ev.measures):
                arrays[f"jump{k}_region{r}"] = measure
        np.savez(out / "measures.npz", **arrays)
    manifest = dict(result.manifest)
    manifest["files"] = files
    manifest["digests"] = {name: _digest(out / name) for name in files}
    manifest.setdefault("wall_time", {})
    manifest["wall_time"].update(write_started=started, write_ended=time.time())
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    return manifest


def read_manifest(run_dir) -> dict:
    path = Path(run_dir) / "manifest.json"
    if not path.exists():
        raise ConfigurationError(f"{run_dir} does not contain manifest.json")
    return json.loads(path.read_text())


def _read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    if not path.exists():
        raise ConfigurationError(f"missing {path}")
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    return header, [line.split(",") for line in lines[1:]]


@dataclass(frozen=True)
class StoredRun:
    """Just enough of a persisted run to drive diagnostics and audits."""

    config: SimulationConfig
    drift: DriftPath
    default_times: tuple[np.ndarray, ...]


def load_run(run_dir) -> StoredRun:
    from .config import config_from_dict

    run_dir = Path(run_dir)
    manifest = read_manifest(run_dir)
    config = config_from_dict(manifest["config"])
    m = config.n_regions

    header, rows = _read_csv(run_dir / "lambda.csv")
    grid = [row for row in rows if row[1] == "grid"]
    times = np.array([float(row[0]) for row in grid])
    values = np.array([[float(x) for x in row[2:]] for row in grid])

    _, jrows = _read_csv(run_dir / "jumps.csv")
    measures = None
    npz_path = run_dir / "measures.npz"
    if npz_path.exists():
        measures = np.load(npz_path)
    jumps = []
    for k, row in enumerate(jrows):
        t, steps = float(row[0]), int(row[1])
        jump, trig, defs = [], [], []
        for r in range(m):
            jump.append(float(row[2 + 3 * r]))
            trig.append(int(row[3 + 3 * r]))
            defs.append(int(row[4 + 3 * r]))
        mea = None
        if measures is not None:
            mea = tuple(measures[f"jump{k}_region{r}"] for r in range(m))
        j = int(round(t / config.dt))
        pre = tuple(values[j - 1] if j > 0 else np.zeros(m))
        jumps.append(JumpEvent(
            time=t, jump=tuple(jump), steps=steps, triggers=tuple(trig),
            defaults=tuple(defs), pre_drift=tuple(float(x) for x in pre),
            post_drift=tuple(float(x) for x in values[j]), measures=mea))

    _, drows = _read_csv(run_dir / "defaults.csv")
    default_times = [np.full(config.n_particles, np.nan) for _ in range(m)]
    for row in drows:
        default_times[int(row[0])][int(row[1])] = float(row[2])

    drift = DriftPath(times=times, values=values, jumps=tuple(jumps))
    return StoredRun(config=config, drift=drift,
                     default_times=tuple(default_times))


def find_run_dirs(root) -> list[Path]:
    """Every directory under root (or root itself) holding a manifest."""
    root = Path(root)
    if (root / "manifest.json").exists():
        return [root]
    found = sorted(p.parent for p in root.glob("**/manifest.json"))
    if not found:
        raise ConfigurationError(f"no run directories under {root}")
    return found
