"""Causal cascade resolution and the minimal (physical) jump size.

When a particle touches the boundary, the loss it inflicts on its own region
can drag further particles under within the same physical instant.  The
instant is resolved on an auxiliary step axis: step 0 holds the particles
already at or below 0, and step k+1 holds the particles whose position lies
below the drift decrement generated by everything defaulted through step k.
The iteration stops the first time no region gains a particle.

All thresholds have the exact form ``(sum_s K[r][s] * count_s) / N`` with
integer counts, and comparisons use those float values directly -- there is
no root finding and no epsilon.  Equality at a threshold counts as a default.
``resolve_cascade`` is the production implementation (sorted inputs, prefix
counters); ``cascade_oracle`` recomputes every set from scratch each step and
exists purely as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class CouplingMatrix:
    """Region-to-region drift sensitivities.

    ``entries[r][s]`` is the drift decrement applied to region r per unit
    defaulted fraction of region s.  Positive diagonal = self-excitation;
    negative off-diagonal = defaults elsewhere push this region's drift down
    (a flight-to-quality gain in normalized coordinates).
    """

    entries: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(float(x) for x in row) for row in self.entries)
        if not rows or any(len(row) != len(rows) for row in rows):
            raise ConfigurationError("coupling matrix must be square and non-empty")
        if not all(np.isfinite(x) for row in rows for x in row):
            raise ConfigurationError("coupling matrix entries must be finite")
        object.__setattr__(self, "entries", rows)

    @property
    def n_regions(self) -> int:
        return len(self.entries)

    def row(self, r: int) -> tuple[float, ...]:
        return self.entries[r]

    def decoupled(self) -> "CouplingMatrix":
        """Keep each region's self-term only (the one-phase counterparts)."""
        m = self.n_regions
        return CouplingMatrix(tuple(
            tuple(self.entries[r][s] if r == s else 0.0 for s in range(m))
            for r in range(m)))

    @classmethod
    def one_phase(cls, alpha: float) -> "CouplingMatrix":
        return cls(((alpha,),))

    @classmethod
    def two_phase(cls, alpha: float, beta: float) -> "CouplingMatrix":
        """The common-drift two-region case: drift alpha*D_X - beta*D_Y seen
        with opposite signs by the two regions."""
        return cls(((alpha, -beta), (-alpha, beta)))

    @classmethod
    def cross_decoupled(cls, alpha_x: float, beta_x: float,
                        alpha_y: float, beta_y: float) -> "CouplingMatrix":
        """Two regions with separated self- and cross-sensitivities."""
        return cls(((alpha_x, -beta_x), (-beta_y, alpha_y)))

    def as_two_phase(self) -> tuple[float, float] | None:
        """Return (alpha, beta) if this is exactly a two_phase matrix."""
        if self.n_regions != 2:
            return None
        (a, mb), (ma, b) = self.entries
        if a > 0 and b > 0 and mb == -b and ma == -a:
            return (a, b)
        return None


def drift_level(row, counts, n: int) -> float:
    """The exact threshold/drift form ``(sum_s row[s] * counts[s]) / n``.

    Every consumer of cascade arithmetic (resolution, oracle, fixed point,
    recorded drift paths) funnels through this accumulation order so that
    cross-checks can assert bitwise float equality.
    """
    acc = 0.0
    for k, c in zip(row, counts):
        acc += k * c
    return acc / n


@dataclass(frozen=True)
class CascadeOutcome:
    """Resolution of one cascade instant.

    ``defaulted[r][k]`` holds region r's newly-defaulted indices at cascade
    step k (indices into the sorted position array that was passed in).
    ``jump[r]`` is the total change of region r's drift across the instant,
    exactly ``drift_level(K.row(r), total_counts, N)``.
    """

    steps: int
    defaulted: tuple[tuple[tuple[int, ...], ...], ...]
    jump: tuple[float, ...]
    trigger: tuple[tuple[int, ...], ...]

    def total_defaults(self, r: int) -> int:
        return sum(len(s) for s in self.defaulted[r])

    def defaulted_indices(self, r: int) -> tuple[int, ...]:
        return tuple(i for step in self.defaulted[r] for i in step)


def _check_inputs(positions, n, coupling):
    if len(positions) != coupling.n_regions:
        raise ConfigurationError(
            f"got {len(positions)} position arrays for "
            f"{coupling.n_regions} regions")
    arrays = []
    for r, p in enumerate(positions):
        a = np.asarray(p, dtype=float)
        if a.ndim != 1:
            raise ValueError(f"region {r}: positions must be 1-d")
        if a.size > n:
            raise ValueError(f"region {r}: more alive particles than N={n}")
        if a.size > 1 and np.any(np.diff(a) < 0):
            raise ValueError(f"region {r}: positions must be sorted ascending")
        arrays.append(a)
    if not any(a.size and a[0] <= 0.0 for a in arrays):
        raise ValueError("no trigger: every position is strictly positive")
    return arrays


def resolve_cascade(positions, n: int, coupling: CouplingMatrix) -> CascadeOutcome:
    """Resolve one cascade instant causally.

    Parameters
    ----------
    positions : per-region 1-d arrays, sorted ascending
        Positions of the particles still alive just before the instant, in
        normalized coordinates; the particles that set off the cascade must
        already sit at values <= 0.
    n : total particle count per region (atoms have mass 1/n)
    coupling : CouplingMatrix

    Because thresholds only ever compare against sorted positions, the
    defaulted set of each region is a prefix of its array; the loop advances
    one prefix counter per region and runs in O(steps * M * log N).
    """
    arrays = _check_inputs(positions, n, coupling)
    m = coupling.n_regions
    counts = [int(np.searchsorted(a, 0.0, side="right")) for a in arrays]
    step_sets = [[tuple(range(counts[r]))] for r in range(m)]

    while True:
        new_counts = []
        for r in range(m):
            thr = drift_level(coupling.row(r), counts, n)
            c = int(np.searchsorted(arrays[r], thr, side="right"))
            new_counts.append(max(c, counts[r]))
        if new_counts == counts:
            break
        for r in range(m):
            step_sets[r].append(tuple(range(counts[r], new_counts[r])))
        counts = new_counts

    jump = tuple(drift_level(coupling.row(r), counts, n) for r in range(m))
    defaulted = tuple(tuple(s) for s in step_sets)
    return CascadeOutcome(
        steps=len(step_sets[0]),
        defaulted=defaulted,
        jump=jump,
        trigger=tuple(s[0] for s in defaulted),
    )


def cascade_oracle(positions, n: int, coupling: CouplingMatrix) -> CascadeOutcome:
    """Literal transcription of the step-set definitions, for testing.

    Recomputes each step's set by scanning every not-yet-defaulted particle;
    no sorting shortcuts, no incremental counters.  Must agree with
    resolve_cascade outcome-for-outcome, bitwise.
    """
    arrays = _check_inputs(positions, n, coupling)
    m = coupling.n_regions
    dead = [set(i for i, x in enumerate(a) if x <= 0.0) for a in arrays]
    step_sets = [[tuple(sorted(dead[r]))] for r in range(m)]

    while True:
        sizes = [len(dead[r]) for r in range(m)]
        gained = False
        fresh = []
        for r in range(m):
            thr = drift_level(coupling.row(r), sizes, n)
            new = {i for i, x in enumerate(arrays[r])
                   if i not in dead[r] and x <= thr}
            fresh.append(new)
            if new:
                gained = True
        if not gained:
            break
        for r in range(m):
            step_sets[r].append(tuple(sorted(fresh[r])))
            dead[r] |= fresh[r]

    sizes = [len(dead[r]) for r in range(m)]
    jump = tuple(drift_level(coupling.row(r), sizes, n) for r in range(m))
    defaulted = tuple(tuple(s) for s in step_sets)
    return CascadeOutcome(
        steps=len(step_sets[0]),
        defaulted=defaulted,
        jump=jump,
        trigger=tuple(s[0] for s in defaulted),
    )


def physical_jump_size(measure, scale: float, n: int) -> float:
    """Minimal self-consistent jump of a single region.

    ``measure`` is the sorted empirical support of the alive particles (atom
    mass 1/n each, boundary hitters clamped to 0).  Returns

        inf{ x > 0 : scale * #(measure in [0, x]) / n < x },

    computed by iterating the count map c -> #(measure <= scale*c/n) from
    c0 = #(measure <= 0) and returning scale * c_inf / n.  An empty measure
    (or one with no mass at 0) yields 0.
    """
    if scale <= 0:
        raise ValueError(f"scale must be > 0, got {scale}")
    a = np.asarray(measure, dtype=float)
    if a.size > 1 and np.any(np.diff(a) < 0):
        raise ValueError("measure must be sorted ascending")
    c = int(np.searchsorted(a, 0.0, side="right"))
    while True:
        thr = drift_level((scale,), (c,), n)
        new_c = max(c, int(np.searchsorted(a, thr, side="right")))
        if new_c == c:
            return drift_level((scale,), (c,), n)
        c = new_c
