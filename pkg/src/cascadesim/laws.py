"""Initial distributions on the positive half-line.

Every region is stored in normalized coordinates: the default boundary sits
at 0 and particles live on the positive axis, so one code path serves both
the self-exciting and the competing phase.  Natively supported laws are
mixtures of uniform pieces (which covers every worked example configuration);
anything else enters through a tabulated inverse CDF loaded from file.

Laws must put no mass at 0: a particle starting exactly on the boundary has
no well-defined side.  Pieces with ``lo == 0`` are rejected unless the law is
built with ``allow_boundary=True``, which exists for experiments only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class UniformPiece:
    """One uniform component of a mixture: mass ``weight`` spread on [lo, hi]."""

    lo: float
    hi: float
    weight: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ConfigurationError(
                f"piece needs lo < hi, got [{self.lo}, {self.hi}]")
        if not self.weight > 0:
            raise ConfigurationError(f"piece weight must be > 0, got {self.weight}")

    @property
    def mean(self) -> float:
        return (self.lo + self.hi) / 2.0


@dataclass(frozen=True)
class InitialLaw:
    """A finite mixture of uniform pieces on the positive axis."""

    pieces: tuple[UniformPiece, ...]
    allow_boundary: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not self.pieces:
            raise ConfigurationError("law needs at least one piece")
        object.__setattr__(self, "pieces", tuple(self.pieces))
        total = sum(p.weight for p in self.pieces)
        if abs(total - 1.0) > _WEIGHT_TOL:
            raise ConfigurationError(
                f"piece weights must sum to 1 within {_WEIGHT_TOL}, got {total!r}")
        for p in self.pieces:
            if p.lo < 0:
                raise ConfigurationError(
                    f"pieces must lie on the positive axis, got lo={p.lo}")
            if p.lo == 0 and not self.allow_boundary:
                raise ConfigurationError(
                    "law puts mass touching 0; pass allow_boundary=True "
                    "if this is intentional")

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return sample_initial(self, n, rng)

    def mean(self) -> float:
        return law_mean(self)

    @property
    def support_hi(self) -> float:
        return max(p.hi for p in self.pieces)


@dataclass(frozen=True)
class QuantileTableLaw:
    """A law given by a tabulated inverse CDF (linear interpolation).

    ``u`` must increase strictly from 0 to 1 and ``q`` must be a
    non-decreasing, strictly positive quantile function.
    """

    u: tuple[float, ...]
    q: tuple[float, ...]

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if u.ndim != 1 or u.shape != q.shape or u.size < 2:
            raise ConfigurationError("quantile table needs two equal-length columns")
        if u[0] != 0.0 or u[-1] != 1.0 or np.any(np.diff(u) <= 0):
            raise ConfigurationError(
                "u column must increase strictly from 0 to 1")
        if np.any(np.diff(q) < 0):
            raise ConfigurationError("quantile column must be non-decreasing")
        if q[0] <= 0:
            raise ConfigurationError(
                "quantile table touches the boundary (no mass at 0 is allowed)")
        object.__setattr__(self, "u", tuple(float(x) for x in u))
        object.__setattr__(self, "q", tuple(float(x) for x in q))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n < 1:
            raise ConfigurationError(f"sample size must be >= 1, got {n}")
        return np.interp(rng.random(n), np.asarray(self.u), np.asarray(self.q))

    def mean(self) -> float:
        # exact trapezoid integral of the interpolated quantile function
        u = np.asarray(self.u)
        q = np.asarray(self.q)
        return float(0.5 * np.sum((q[1:] + q[:-1]) * np.diff(u)))

    @property
    def support_hi(self) -> float:
        return self.q[-1]


def load_quantile_table(path) -> QuantileTableLaw:
    """Read a two-column ``u,quantile`` text file into a law."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ConfigurationError(
                    f"{path}:{lineno}: expected 'u,quantile', got {raw!r}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: {exc}") from exc
    if len(rows) < 2:
        raise ConfigurationError(f"{path}: quantile table needs at least 2 rows")
    u, q = zip(*rows)
    return QuantileTableLaw(u=u, q=q)


def sample_initial(law: InitialLaw, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` i.i.d. samples from a uniform-mixture law.

    Consumes exactly two blocks of ``n`` uniforms from ``rng`` (piece
    selection, then position within the piece), so the draw is a pure
    function of the stream state.
    """
    if n < 1:
        raise ConfigurationError(f"sample size must be >= 1, got {n}")
    lows = np.array([p.lo for p in law.pieces])
    highs = np.array([p.hi for p in law.pieces])
    weights = np.array([p.weight for p in law.pieces])
    cum = np.cumsum(weights)
    cum[-1] = 1.0  # guard the top edge against the 1e-12 slack
    idx = np.searchsorted(cum, rng.random(n), side="right")
    u = rng.random(n)
    return lows[idx] + u * (highs[idx] - lows[idx])


def law_mean(law: InitialLaw) -> float:
    """Exact mixture mean, sum of weight * (lo + hi) / 2."""
    return sum(p.weight * p.mean for p in law.pieces)
