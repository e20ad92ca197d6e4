"""Runtime audits and Monte Carlo checks against the theory.

Three families live here:

* the oscillation-tail check: the probability that the common drift shows a
  w-oscillation of size r in a delta-window is bounded by
  4*(alpha+beta)/r * Phi(-r / (2*sqrt(2*delta))), which we test empirically
  across independent runs;
* the jump criterion: the common drift of the two-phase system cannot stay
  continuous when alpha*E[X0] - beta*E[Y0] < (alpha-beta)^2 / 2;
* the physicality audit: at any cascade started by a single region that
  stayed alone (no other region defaulted during the instant), the recorded
  jump must equal the minimal fixed point of that region's own pre-jump
  measure, exactly, in integer-count arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cascade import physical_jump_size
from .engine import SimulationResult
from .errors import AuditUnavailable, ConfigurationError
from .paths import w_oscillation


def normal_cdf(x: float) -> float:
    """Standard Gaussian CDF via the complementary error function.

    Phi(x) = erfc(-x / sqrt(2)) / 2; the C library erfc keeps this within a
    few ulp, far inside the 1e-12 absolute accuracy the checks rely on.
    """
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def oscillation_tail_bound(r: float, delta: float, alpha: float, beta: float) -> float:
    """The analytic bound on P(w(drift, t, delta) >= r) for the two-phase
    common drift; valid for every t and every N."""
    if r <= 0 or delta <= 0:
        raise ConfigurationError("r and delta must be > 0")
    return 4.0 * (alpha + beta) / r * normal_cdf(-r / (2.0 * math.sqrt(2.0 * delta)))


def tightness_check(drift_paths, r: float, delta: float, t: float,
                    alpha: float, beta: float) -> tuple[float, float]:
    """Empirical frequency of {w >= r} across runs, next to the bound.

    ``drift_paths`` are the region-0 drift paths of independent runs of one
    two-phase config (the w-window is the full horizon, clipped around t).
    """
    paths = list(drift_paths)
    if not paths:
        raise ConfigurationError("tightness check needs at least one run")
    exceed = sum(1 for h in paths if w_oscillation(h, t, delta) >= r)
    return exceed / len(paths), oscillation_tail_bound(r, delta, alpha, beta)


def discontinuity_criterion(alpha: float, beta: float,
                            mean_x: float, mean_y: float) -> bool:
    """Whether a jump in the common drift is forced by the initial means.

    ``mean_y`` is the mean of the competing phase in original coordinates
    (non-positive for laws on the negative axis).  Sufficient, not
    necessary: True guarantees every solution jumps somewhere.
    """
    if alpha <= 0 or beta < 0:
        raise ConfigurationError("need alpha > 0 and beta >= 0")
    return alpha * mean_x - beta * mean_y < (alpha - beta) ** 2 / 2.0


@dataclass(frozen=True)
class AuditRow:
    time: float
    region: int
    recorded: float
    recomputed: float
    passed: bool


@dataclass(frozen=True)
class AuditReport:
    rows: tuple[AuditRow, ...]
    skipped: int  # jumps outside the single-region audit's scope

    @property
    def violations(self) -> tuple[AuditRow, ...]:
        return tuple(row for row in self.rows if not row.passed)

    @property
    def passed(self) -> bool:
        return not self.violations


def physicality_audit(result: SimulationResult) -> AuditReport:
    """Re-derive each auditable jump from its stored pre-jump measure.

    A jump is auditable when exactly one region triggered, no other region
    defaulted during the instant, and the triggering region's self-coupling
    is positive: then the cascade reduces to that region's own count
    iteration and the recorded jump must equal physical_jump_size of the
    stored measure bit for bit.
    """
    jumps = result.drift.jumps
    if not jumps:
        return AuditReport(rows=(), skipped=0)
    if any(ev.measures is None for ev in jumps):
        raise AuditUnavailable(
            "run was recorded without pre-jump measures; re-run with "
            "record_paths=true to audit")
    coupling = result.config.coupling
    n = result.config.n_particles
    rows = []
    skipped = 0
    for ev in jumps:
        triggered = [r for r, k in enumerate(ev.triggers) if k > 0]
        if len(triggered) != 1:
            skipped += 1
            continue
        r = triggered[0]
        others_quiet = all(ev.defaults[s] == 0 for s in range(len(ev.defaults))
                           if s != r)
        if not others_quiet or coupling.entries[r][r] <= 0:
            skipped += 1
            continue
        measure = ev.measures[r]
        recomputed = physical_jump_size(measure, coupling.entries[r][r], n)
        rows.append(AuditRow(
            time=ev.time,
            region=r,
            recorded=ev.jump[r],
            recomputed=recomputed,
            passed=(ev.jump[r] == recomputed),
        ))
    return AuditReport(rows=tuple(rows), skipped=skipped)
