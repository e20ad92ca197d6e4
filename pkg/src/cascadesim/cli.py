"""Command line front end.

Subcommands: ``run`` (one simulation), ``sweep`` (grid over system sizes and
seeds plus a convergence diagnostic), ``compare`` (coupled system against
its decoupled one-phase counterparts on identical noise), ``diagnose``
(oscillation-tail check over stored runs), ``audit`` (physicality audit over
stored runs).

Exit codes: 0 success, 2 configuration problem, 3 runtime fault, 4 broken
invariant or failed audit.
"""

from __future__ import annotations

import argparse
import itertools
import multiprocessing
import sys
from pathlib import Path

import numpy as np

from . import engine
from .config import load_config, load_config_seeds
from .diagnostics import physicality_audit, tightness_check
from .errors import (AuditUnavailable, CascadesimError, ConfigurationError,
                     InvariantViolation, RuntimeFault)
from .paths import CadlagPath, m1_distance
from .runio import find_run_dirs, fmt, load_run, write_run

_EXIT = {ConfigurationError: 2, AuditUnavailable: 2, RuntimeFault: 3,
         InvariantViolation: 4}


def _execute(config):
    result = engine.run(config)
    engine.check_representation(result)
    return result


def _pool_map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with multiprocessing.Pool(processes=workers) as pool:
        return pool.map(fn, tasks)


def cmd_run(args) -> int:
    config = load_config(args.config, seed_override=args.seed,
                         scheme_override=args.scheme)
    result = _execute(config)
    write_run(result, args.out)
    totals = result.manifest["totals"]
    print(f"run: N={config.n_particles} T={config.horizon} "
          f"seed={config.seed} scheme={config.scheme} "
          f"defaults={totals['defaults']} jumps={totals['jump_events']}")
    return 0


def _mean_drift_path(results, region: int) -> CadlagPath:
    values = np.mean([r.drift.values[:, region] for r in results], axis=0)
    times = results[0].drift.times
    return CadlagPath(times=times, values=values, start_value=0.0,
                      end=float(times[-1]), kind="step")


def _default_probes(horizon: float) -> list[float]:
    return [round(f * horizon, 12) for f in (0.1, 0.3, 0.5, 0.7, 0.9)]


def cmd_sweep(args) -> int:
    n_list = [int(x) for x in args.n_list.split(",")]
    if len(set(n_list)) != len(n_list):
        raise ConfigurationError(f"duplicate N values in {n_list}")
    base = load_config(args.config, scheme_override=args.scheme)
    base_seed = args.seed if args.seed is not None else base.seed
    out = Path(args.out)

    import dataclasses
    tasks = []
    for n, k in itertools.product(n_list, range(args.seeds_per_n)):
        tasks.append(dataclasses.replace(base, n_particles=n,
                                         seed=base_seed + k))
    results = _pool_map(_execute, tasks, args.workers)
    by_n: dict[int, list] = {n: [] for n in n_list}
    for config, result in zip(tasks, results):
        write_run(result, out / f"N{config.n_particles}_s{config.seed}")
        by_n[config.n_particles].append(result)

    probes = ([float(x) for x in args.probe_times.split(",")]
              if args.probe_times else _default_probes(base.horizon))
    lines = ["N_lo,N_hi,kind,probe_t,value"]
    for n_lo, n_hi in zip(n_list, n_list[1:]):
        lo = _mean_drift_path(by_n[n_lo], 0)
        hi = _mean_drift_path(by_n[n_hi], 0)
        d = m1_distance(lo, hi, max(args.m1_resolution, len(lo.times)))
        lines.append(f"{n_lo},{n_hi},m1_mean_drift,,{fmt(d)}")
        for t in probes:
            gap = abs(lo(t) - hi(t))
            lines.append(f"{n_lo},{n_hi},sup_at_probe,{fmt(t)},{fmt(gap)}")
    out.mkdir(parents=True, exist_ok=True)
    (out / "convergence.csv").write_text("\n".join(lines) + "\n")
    print(f"sweep: {len(tasks)} runs over N in {n_list}; "
          f"convergence.csv written")
    return 0


def _order_violations(coupled, decoupled) -> list[str]:
    """Comparison-principle violations between one coupled/decoupled pair.

    Valid whenever every cross-coupling is non-positive: dropping the
    cross terms can only hurt, so the coupled system defaults later,
    region by region and particle by particle, and carries lower drift.
    """
    bad = []
    for r in range(coupled.config.n_regions):
        tc = np.where(np.isnan(coupled.default_times[r]), np.inf,
                      coupled.default_times[r])
        td = np.where(np.isnan(decoupled.default_times[r]), np.inf,
                      decoupled.default_times[r])
        for i in np.flatnonzero(tc < td):
            bad.append(f"region {r} particle {i}: coupled defaulted at "
                       f"{tc[i]} before decoupled {td[i]}")
        if np.any(coupled.default_counts[:, r] > decoupled.default_counts[:, r]):
            bad.append(f"region {r}: coupled default fraction exceeded "
                       f"the decoupled one")
        if np.any(coupled.drift.values[:, r] > decoupled.drift.values[:, r]):
            bad.append(f"region {r} drift: coupled exceeded decoupled")
    return bad


def _write_compare(out_dir: Path, coupled, decoupled) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    m = coupled.config.n_regions
    lines = ["region,particle_id,coupled_time,decoupled_time"]
    for r in range(m):
        for i in range(coupled.config.n_particles):
            tc, td = coupled.default_times[r][i], decoupled.default_times[r][i]
            lines.append(",".join([
                str(r), str(i),
                fmt(tc) if not np.isnan(tc) else "",
                fmt(td) if not np.isnan(td) else ""]))
    (out_dir / "paired_defaults.csv").write_text("\n".join(lines) + "\n")

    cols = ["t"] + [f"coupled_L_{r}" for r in range(m)] + \
        [f"decoupled_L_{r}" for r in range(m)]
    lines = [",".join(cols)]
    for j, t in enumerate(coupled.drift.times):
        row = [fmt(t)] + [fmt(x) for x in coupled.drift.values[j]] + \
            [fmt(x) for x in decoupled.drift.values[j]]
        lines.append(",".join(row))
    (out_dir / "drift_overlay.csv").write_text("\n".join(lines) + "\n")


def cmd_compare(args) -> int:
    import dataclasses
    base = load_config(args.config, seed_override=args.seed,
                       scheme_override=args.scheme)
    m = base.coupling.n_regions
    if any(base.coupling.entries[r][s] > 0
           for r in range(m) for s in range(m) if r != s):
        raise ConfigurationError(
            "compare needs non-positive cross-couplings; the decoupled "
            "ordering has no meaning otherwise")
    seeds = [base.seed] if args.seed is not None else load_config_seeds(args.config)
    out = Path(args.out)
    tasks = []
    for seed in seeds:
        coupled = dataclasses.replace(base, seed=seed)
        decoupled = dataclasses.replace(
            base, seed=seed, coupling=base.coupling.decoupled())
        tasks += [coupled, decoupled]
    results = _pool_map(_execute, tasks, args.workers)

    violations = []
    for k, seed in enumerate(seeds):
        coupled, decoupled = results[2 * k], results[2 * k + 1]
        pair_dir = out / f"seed{seed}"
        write_run(coupled, pair_dir / "coupled")
        write_run(decoupled, pair_dir / "decoupled")
        _write_compare(pair_dir, coupled, decoupled)
        violations += [f"seed {seed}: {v}"
                       for v in _order_violations(coupled, decoupled)]
    if violations:
        for v in violations:
            print(f"ORDERING VIOLATION: {v}", file=sys.stderr)
        raise InvariantViolation(
            f"{len(violations)} comparison-principle violations")
    print(f"compare: {len(seeds)} seed(s), orderings hold")
    return 0


def cmd_diagnose(args) -> int:
    run_dirs = find_run_dirs(args.out)
    runs = [load_run(d) for d in run_dirs]
    two_phase = runs[0].config.coupling.as_two_phase()
    if two_phase is None:
        raise ConfigurationError(
            "the oscillation-tail check is only wired to two-phase "
            "common-drift configs")
    alpha, beta = two_phase
    r_grid = [float(x) for x in args.r.split(",")]
    d_grid = [float(x) for x in args.delta.split(",")]
    t_grid = [float(x) for x in args.t.split(",")]
    paths = [s.drift.region_path(0) for s in runs]
    lines = ["delta,r,t,empirical_prob,bound"]
    worst = 0.0
    for delta, r, t in itertools.product(d_grid, r_grid, t_grid):
        emp, bound = tightness_check(paths, r, delta, t, alpha, beta)
        worst = max(worst, emp - bound)
        lines.append(f"{fmt(delta)},{fmt(r)},{fmt(t)},{fmt(emp)},{fmt(bound)}")
    Path(args.out, "oscillations.csv").write_text("\n".join(lines) + "\n")
    print(f"diagnose: {len(runs)} runs, worst (empirical - bound) = {worst:.4g}")
    return 0


def cmd_audit(args) -> int:
    run_dirs = find_run_dirs(args.out)
    lines = ["jump_time,region,recorded,recomputed,pass"]
    violations = 0
    audited = 0
    for d in run_dirs:
        report = physicality_audit(load_run(d))
        for row in report.rows:
            audited += 1
            violations += 0 if row.passed else 1
            lines.append(f"{fmt(row.time)},{row.region},{fmt(row.recorded)},"
                         f"{fmt(row.recomputed)},{str(row.passed).lower()}")
    Path(args.out, "audit.csv").write_text("\n".join(lines) + "\n")
    print(f"audit: {audited} jumps audited across {len(run_dirs)} runs, "
          f"{violations} violations")
    if violations:
        raise InvariantViolation(f"{violations} physicality violations")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cascadesim",
        description="coupled mean-field default-cascade simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="TOML config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--scheme", choices=("grid", "bridge"), default=None,
                       help="override the hit-detection scheme")

    p_run = sub.add_parser("run", help="one simulation")
    common(p_run)
    p_run.set_defaults(fn=cmd_run)

    p_sweep = sub.add_parser("sweep", help="grid over N and seeds")
    common(p_sweep)
    p_sweep.add_argument("--n-list", required=True,
                         help="comma-separated system sizes")
    p_sweep.add_argument("--seeds-per-n", type=int, default=20)
    p_sweep.add_argument("--probe-times", default=None,
                         help="comma-separated drift probe times")
    p_sweep.add_argument("--m1-resolution", type=int, default=800)
    p_sweep.set_defaults(fn=cmd_sweep)

    p_cmp = sub.add_parser("compare",
                           help="coupled vs decoupled on shared noise")
    common(p_cmp)
    p_cmp.set_defaults(fn=cmd_compare)

    p_diag = sub.add_parser("diagnose",
                            help="oscillation-tail check over stored runs")
    p_diag.add_argument("--out", required=True,
                        help="directory holding prior runs")
    p_diag.add_argument("--r", default="0.1,0.25,0.5")
    p_diag.add_argument("--delta", default="0.0025,0.01,0.04")
    p_diag.add_argument("--t", default="0.25,0.5")
    p_diag.set_defaults(fn=cmd_diagnose)

    p_audit = sub.add_parser("audit",
                             help="physicality audit over stored runs")
    p_audit.add_argument("--out", required=True,
                         help="directory holding prior runs")
    p_audit.set_defaults(fn=cmd_audit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CascadesimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for klass, code in _EXIT.items():
            if isinstance(exc, klass):
                return code
        return 1


if __name__ == "__main__":
    sys.exit(main())
