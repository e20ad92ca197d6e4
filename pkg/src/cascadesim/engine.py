"""Discrete-time engine for coupled absorbed-particle systems.

Each region holds N particles on the positive axis.  Alive particles receive
independent Gaussian increments of variance dt; a particle defaults the
first time it is detected at or below 0, at which point a cascade is
resolved and every survivor of region r moves by the resulting drift jump.
Dead particles are frozen and only contribute their default time.

Scheme "grid" detects hits at grid points only (which biases first-passage
times upward); "bridge" additionally kills particles that stayed positive at
both endpoints with the Brownian-bridge crossing probability
exp(-2*a*b/dt), consuming one uniform per particle per step so that the
draw for particle i at step j never depends on the history of other
particles or configs.

Cascade thresholds see positions after the Brownian increment and before
any drift jump; the recorded drift is recomputed from cumulative default
counts at every grid time, so the identity

    L_r(t) = (sum_s K[r][s] * defaults_s(t)) / N

holds exactly (same float expression, same accumulation order) rather than
up to accumulated rounding.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import streams
from .cascade import CascadeOutcome, CouplingMatrix, drift_level, resolve_cascade
from .errors import ConfigurationError, RuntimeFault
from .laws import InitialLaw, QuantileTableLaw
from .paths import CadlagPath

_GRID_TOL = 1e-9
# record_paths keeps a full (steps x regions x N) position history in memory
_PATH_RECORD_CAP = 50_000_000


@dataclass(frozen=True)
class SimulationConfig:
    n_particles: int
    horizon: float
    dt: float
    seed: int
    coupling: CouplingMatrix
    regions: tuple
    scheme: str = "grid"
    snapshot_times: tuple[float, ...] = ()
    snapshot_bins: int = 100
    snapshot_range: tuple[float, float] | None = None
    record_paths: bool = False
    region_names: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n_particles < 1:
            raise ConfigurationError(f"N must be >= 1, got {self.n_particles}")
        if not (0 < self.dt <= self.horizon):
            raise ConfigurationError(
                f"need 0 < dt <= T, got dt={self.dt}, T={self.horizon}")
        steps = round(self.horizon / self.dt)
        if steps < 1 or abs(steps * self.dt - self.horizon) > _GRID_TOL * max(1.0, self.horizon):
            raise ConfigurationError(
                f"horizon {self.horizon} is not a whole number of dt={self.dt} steps")
        if self.scheme not in ("grid", "bridge"):
            raise ConfigurationError(f"unknown scheme {self.scheme!r}")
        object.__setattr__(self, "regions", tuple(self.regions))
        if len(self.regions) != self.coupling.n_regions:
            raise ConfigurationError(
                f"{len(self.regions)} region laws for a "
                f"{self.coupling.n_regions}-region coupling matrix")
        object.__setattr__(self, "snapshot_times",
                           tuple(float(t) for t in self.snapshot_times))
        for t in self.snapshot_times:
            if not (0.0 <= t <= self.horizon):
                raise ConfigurationError(f"snapshot time {t} outside [0, T]")
        if self.snapshot_bins < 1:
            raise ConfigurationError("snapshot_bins must be >= 1")
        if self.region_names is not None:
            object.__setattr__(self, "region_names", tuple(self.region_names))
            if len(self.region_names) != self.coupling.n_regions:
                raise ConfigurationError("one name per region required")
        if self.record_paths and self.n_particles * steps > _PATH_RECORD_CAP:
            raise ConfigurationError(
                "record_paths would store too much state at this N and dt; "
                "use snapshots instead")

    @property
    def n_steps(self) -> int:
        return round(self.horizon / self.dt)

    @property
    def n_regions(self) -> int:
        return self.coupling.n_regions

    def names(self) -> tuple[str, ...]:
        if self.region_names is not None:
            return self.region_names
        return tuple(str(r) for r in range(self.n_regions))


@dataclass
class ParticleState:
    """Mutable state of all particles; arrays are one entry per particle."""

    positions: list[np.ndarray]
    alive: list[np.ndarray]
    default_times: list[np.ndarray]  # nan while alive
    clock: float = 0.0

    @property
    def n_regions(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class JumpEvent:
    """One cascade instant: when, how big, who started it.

    ``measures`` (only kept under record_paths) holds, per region, the
    sorted positions of every particle alive just before the jump with the
    triggers clamped to 0 -- exactly the empirical measure the physical
    jump-size condition is stated on.
    """

    time: float
    jump: tuple[float, ...]
    steps: int
    triggers: tuple[int, ...]
    defaults: tuple[int, ...]
    pre_drift: tuple[float, ...]
    post_drift: tuple[float, ...]
    measures: tuple[np.ndarray, ...] | None = None


@dataclass(frozen=True)
class DriftPath:
    """Recorded interaction terms on the time grid, plus the jump registry."""

    times: np.ndarray            # grid times, starting at 0
    values: np.ndarray           # (n_times, n_regions)
    jumps: tuple[JumpEvent, ...]

    def region_path(self, r: int) -> CadlagPath:
        return CadlagPath(times=self.times, values=self.values[:, r],
                          start_value=0.0, end=float(self.times[-1]), kind="step")


@dataclass(frozen=True)
class SnapshotRecord:
    time: float
    region: int
    bin_edges: np.ndarray
    counts: np.ndarray


@dataclass(frozen=True)
class SimulationResult:
    config: SimulationConfig
    drift: DriftPath
    default_times: tuple[np.ndarray, ...]
    default_counts: np.ndarray   # (n_times, n_regions), cumulative
    snapshots: tuple[SnapshotRecord, ...]
    particle_paths: np.ndarray | None  # (n_times, n_regions, N) under record_paths
    manifest: dict = field(repr=False)


def advance_step(state: ParticleState, increments, dt: float) -> ParticleState:
    """Apply one step of caller-supplied increments to the alive particles.

    No absorption happens here; hit detection is a separate pass.
    """
    for r in range(state.n_regions):
        np.add(state.positions[r], increments[r],
               out=state.positions[r], where=state.alive[r])
    state.clock += dt
    return state


def detect_hits(state: ParticleState, scheme: str, pre_positions, dt: float,
                rngs=None) -> list[np.ndarray]:
    """Boundary-hit masks per region for the step that just happened.

    grid: alive particles sitting at or below 0.  bridge: additionally,
    particles positive at both endpoints are flagged with the bridge
    crossing probability exp(-2*a*b/dt); one uniform per particle per
    region is always consumed so streams stay aligned across configs.
    """
    masks = []
    for r in range(state.n_regions):
        pos = state.positions[r]
        mask = state.alive[r] & (pos <= 0.0)
        if scheme == "bridge":
            u = rngs[r].random(pos.shape[0])
            pre = pre_positions[r]
            candidates = state.alive[r] & (pre > 0.0) & (pos > 0.0)
            with np.errstate(under="ignore"):
                p_cross = np.exp(-2.0 * pre * pos / dt)
            mask |= candidates & (u < p_cross)
        masks.append(mask)
    return masks


def snapshot_density(state: ParticleState, bins: int, value_range) -> list[np.ndarray]:
    """Histogram counts of alive positions per region (total <= N)."""
    if bins < 1:
        raise ConfigurationError("bins must be >= 1")
    out = []
    for r in range(state.n_regions):
        alive_pos = state.positions[r][state.alive[r]]
        counts, _ = np.histogram(alive_pos, bins=bins, range=value_range)
        out.append(counts)
    return out


def _apply_cascade(state: ParticleState, masks, n: int, coupling: CouplingMatrix,
                   t: float, keep_measures: bool):
    """Resolve the cascade the flagged particles set off and apply it."""
    m = state.n_regions
    sorted_vals, orders, alive_ids = [], [], []
    for r in range(m):
        ids = np.flatnonzero(state.alive[r])
        vals = state.positions[r][ids].copy()
        flagged = masks[r][ids]
        # bridge-flagged particles crossed mid-step: they enter the cascade
        # measure at the boundary
        vals[flagged] = np.minimum(vals[flagged], 0.0)
        order = np.argsort(vals, kind="stable")
        sorted_vals.append(vals[order])
        orders.append(order)
        alive_ids.append(ids)

    outcome = resolve_cascade(sorted_vals, n, coupling)

    for r in range(m):
        idx = np.fromiter(outcome.defaulted_indices(r), dtype=np.int64,
                          count=outcome.total_defaults(r))
        if idx.size:
            particles = alive_ids[r][orders[r][idx]]
            state.positions[r][particles] = np.minimum(
                state.positions[r][particles], 0.0)
            state.alive[r][particles] = False
            state.default_times[r][particles] = t
        survivors = state.alive[r]
        np.subtract(state.positions[r], outcome.jump[r],
                    out=state.positions[r], where=survivors)

    measures = tuple(sorted_vals) if keep_measures else None
    return outcome, measures


def _region_rngs(config: SimulationConfig, purpose: int):
    return [streams.substream(config.seed, r, purpose)
            for r in range(config.n_regions)]


def _snapshot_range(config: SimulationConfig) -> tuple[float, float]:
    if config.snapshot_range is not None:
        lo, hi = config.snapshot_range
        if not lo < hi:
            raise ConfigurationError("snapshot range needs lo < hi")
        return float(lo), float(hi)
    top = max(law.support_hi for law in config.regions)
    return (0.0, 1.5 * top)


def run(config: SimulationConfig) -> SimulationResult:
    """Advance the coupled systems over the whole horizon.

    Bit-identical output is guaranteed for identical (config, seed): all
    randomness flows through keyed substreams with a fixed draw pattern (N
    Gaussians per region per step, plus N uniforms under the bridge scheme),
    and nothing depends on scheduling.
    """
    run_started = time.time()
    n, m = config.n_particles, config.n_regions
    n_steps = config.n_steps
    init_rngs = _region_rngs(config, streams.INIT)
    gauss_rngs = _region_rngs(config, streams.GAUSS)
    bridge_rngs = _region_rngs(config, streams.BRIDGE) if config.scheme == "bridge" else None

    state = ParticleState(
        positions=[config.regions[r].sample(n, init_rngs[r]) for r in range(m)],
        alive=[np.ones(n, dtype=bool) for _ in range(m)],
        default_times=[np.full(n, np.nan) for _ in range(m)],
    )

    counts = np.zeros((n_steps + 1, m), dtype=np.int64)
    times = np.arange(n_steps + 1) * config.dt
    jump_events: list[JumpEvent] = []
    cum = [0] * m

    snap_steps: dict[int, list[float]] = {}
    for t_snap in config.snapshot_times:
        snap_steps.setdefault(round(t_snap / config.dt), []).append(t_snap)
    snap_range = _snapshot_range(config)
    snapshots: list[SnapshotRecord] = []

    paths_rec = None
    if config.record_paths:
        paths_rec = np.empty((n_steps + 1, m, n))

    def record_jump(outcome: CascadeOutcome, measures, t: float, pre_counts):
        post_counts = [pre_counts[r] + outcome.total_defaults(r) for r in range(m)]
        jump_events.append(JumpEvent(
            time=t,
            jump=outcome.jump,
            steps=outcome.steps,
            triggers=tuple(len(s) for s in outcome.trigger),
            defaults=tuple(outcome.total_defaults(r) for r in range(m)),
            pre_drift=tuple(drift_level(config.coupling.row(r), pre_counts, n)
                            for r in range(m)),
            post_drift=tuple(drift_level(config.coupling.row(r), post_counts, n)
                             for r in range(m)),
            measures=measures,
        ))
        return post_counts

    def bookkeep(j: int, t: float):
        counts[j] = cum
        if paths_rec is not None:
            for r in range(m):
                paths_rec[j, r] = state.positions[r]
        if j in snap_steps:
            hists = snapshot_density(state, config.snapshot_bins, snap_range)
            edges = np.histogram_bin_edges([], bins=config.snapshot_bins,
                                           range=snap_range)
            for t_snap in snap_steps[j]:
                for r in range(m):
                    snapshots.append(SnapshotRecord(
                        time=t_snap, region=r, bin_edges=edges, counts=hists[r]))

    # a law may legitimately place particles at/below 0 only via the
    # explicit boundary flags; resolve such triggers at time 0
    masks0 = [state.alive[r] & (state.positions[r] <= 0.0) for r in range(m)]
    if any(mk.any() for mk in masks0):
        outcome, measures = _apply_cascade(
            state, masks0, n, config.coupling, 0.0, config.record_paths)
        cum = record_jump(outcome, measures, 0.0, cum)
    bookkeep(0, 0.0)

    sqrt_dt = math.sqrt(config.dt)
    needs_pre = config.scheme == "bridge"
    for j in range(1, n_steps + 1):
        t = float(times[j])
        pre_positions = [p.copy() for p in state.positions] if needs_pre else None
        increments = [gauss_rngs[r].standard_normal(n) * sqrt_dt for r in range(m)]
        advance_step(state, increments, config.dt)
        masks = detect_hits(state, config.scheme, pre_positions, config.dt,
                            bridge_rngs)
        if any(mk.any() for mk in masks):
            outcome, measures = _apply_cascade(
                state, masks, n, config.coupling, t, config.record_paths)
            cum = record_jump(outcome, measures, t, cum)
        for r in range(m):
            if not np.isfinite(state.positions[r]).all():
                bad = int(np.flatnonzero(~np.isfinite(state.positions[r]))[0])
                raise RuntimeFault(
                    f"non-finite position: region {r}, particle {bad}, "
                    f"step {j} (t={t}); drift so far "
                    f"{[drift_level(config.coupling.row(s), cum, n) for s in range(m)]}")
        bookkeep(j, t)

    values = np.zeros((n_steps + 1, m))
    for r in range(m):
        acc = np.zeros(n_steps + 1)
        for s in range(m):
            acc += config.coupling.entries[r][s] * counts[:, s]
        values[:, r] = acc / n

    drift = DriftPath(times=times, values=values, jumps=tuple(jump_events))
    manifest = build_manifest(config, drift, state)
    manifest["wall_time"] = {"run_started": run_started, "run_ended": time.time()}
    return SimulationResult(
        config=config,
        drift=drift,
        default_times=tuple(state.default_times),
        default_counts=counts,
        snapshots=tuple(snapshots),
        particle_paths=paths_rec,
        manifest=manifest,
    )


def build_manifest(config: SimulationConfig, drift: DriftPath,
                   state: ParticleState) -> dict:
    m = config.n_regions
    return {
        "config": config_to_dict(config),
        "seed": config.seed,
        "scheme": config.scheme,
        "versions": {"cascadesim": _version(), "numpy": np.__version__},
        "totals": {
            "defaults": [int(config.n_particles - state.alive[r].sum())
                         for r in range(m)],
            "jump_events": len(drift.jumps),
            "final_drift": [float(x) for x in drift.values[-1]],
        },
    }


def config_to_dict(config: SimulationConfig) -> dict:
    regions = []
    for r, law in enumerate(config.regions):
        entry = {"name": config.names()[r]}
        if isinstance(law, InitialLaw):
            entry["pieces"] = [{"lo": p.lo, "hi": p.hi, "weight": p.weight}
                               for p in law.pieces]
            if law.allow_boundary:
                entry["allow_boundary"] = True
        elif isinstance(law, QuantileTableLaw):
            entry["quantile_u"] = list(law.u)
            entry["quantile_q"] = list(law.q)
        regions.append(entry)
    out = {
        "N": config.n_particles,
        "T": config.horizon,
        "dt": config.dt,
        "seed": config.seed,
        "scheme": config.scheme,
        "K": [list(row) for row in config.coupling.entries],
        "snapshot_times": list(config.snapshot_times),
        "snapshot_bins": config.snapshot_bins,
        "record_paths": config.record_paths,
        "regions": regions,
    }
    if config.snapshot_range is not None:
        out["snapshot_range"] = list(config.snapshot_range)
    return out


def _version() -> str:
    try:
        from importlib.metadata import version
        return version("cascadesim")
    except Exception:
        return "unknown"


def check_representation(result: SimulationResult) -> None:
    """Assert the drift/defaulted-fraction identity exactly, plus the
    two-phase confinement of the common drift to [-beta, alpha]."""
    from .errors import InvariantViolation

    cfg = result.config
    counts = result.default_counts
    n = cfg.n_particles
    for r in range(cfg.n_regions):
        acc = np.zeros(counts.shape[0])
        for s in range(cfg.n_regions):
            acc += cfg.coupling.entries[r][s] * counts[:, s]
        expect = acc / n
        got = result.drift.values[:, r]
        if not np.array_equal(expect, got):
            j = int(np.flatnonzero(expect != got)[0])
            raise InvariantViolation(
                f"drift identity broken at region {r}, grid index {j}: "
                f"{got[j]!r} != {expect[j]!r}")
    two_phase = cfg.coupling.as_two_phase()
    if two_phase is not None:
        alpha, beta = two_phase
        lam = result.drift.values[:, 0]
        if lam.max() > alpha or lam.min() < -beta:
            raise InvariantViolation(
                f"common drift left [-{beta}, {alpha}]: "
                f"range [{lam.min()!r}, {lam.max()!r}]")
