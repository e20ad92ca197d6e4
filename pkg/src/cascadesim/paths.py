"""Cadlag paths, M1-style oscillation functionals, and an M1 distance.

The drift trajectories the engine records are right-continuous step
functions with finitely many breakpoints, and Brownian grid paths are
piecewise linear.  For both classes the oscillation suprema over continuum
time triples collapse to finite candidate sets, so everything here is exact
at breakpoint resolution; arbitrary paths are out of scope.

The w-oscillation of h around t measures how far h(t2) can stray from the
segment [h(t1), h(t3)] for ordered triples inside the delta-window around t;
the v-oscillation is the plain modulus max |h(t2) - h(t1)|; their
combination u (v at both window endpoints, w everywhere) is the modulus
whose vanishing characterizes M1 tightness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CadlagPath:
    """A cadlag path on [times[0], end] with finitely many breakpoints.

    kind="step": h equals values[i] on [times[i], times[i+1]); jumps happen
    at breakpoints.  kind="linear": h interpolates (times[i], values[i]) and
    is constant after the last breakpoint.  ``start_value`` is the left
    limit at the domain start (the pre-history the path is extended with).
    """

    times: np.ndarray
    values: np.ndarray
    start_value: float
    end: float
    kind: str = "step"

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size == 0:
            raise ValueError("times/values must be equal-length 1-d arrays")
        if np.any(np.diff(t) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if self.end < t[-1]:
            raise ValueError("domain end lies before the last breakpoint")
        if self.kind not in ("step", "linear"):
            raise ValueError(f"unknown path kind {self.kind!r}")
        if self.kind == "linear" and self.start_value != v[0]:
            raise ValueError("a linear path must start at its first value")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def start(self) -> float:
        return float(self.times[0])

    def __call__(self, t: float) -> float:
        if t < self.start or t > self.end:
            raise ValueError(f"t={t} outside domain [{self.start}, {self.end}]")
        if self.kind == "linear":
            return float(np.interp(t, self.times, self.values))
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        return float(self.values[i])

    def left_limit(self, t: float) -> float:
        if t == self.start:
            return self.start_value
        if self.kind == "linear":
            return self(t)
        i = int(np.searchsorted(self.times, t, side="left")) - 1
        return float(self.values[max(i, 0)])

    def extended(self, pad: float = 1.0) -> "CadlagPath":
        """Embed into a larger window: constant pre-history at the left
        limit on [start-pad, start), constant continuation on (end, end+pad]."""
        if pad <= 0:
            raise ValueError("pad must be > 0")
        return CadlagPath(
            times=np.concatenate(([self.start - pad], self.times)),
            values=np.concatenate(([self.start_value], self.values)),
            start_value=self.start_value,
            end=self.end + pad,
            kind=self.kind,
        )


@dataclass(frozen=True)
class OscillationReport:
    """u-oscillation of one path at window half-width delta."""

    w_sup: float
    v_start: float
    v_end: float
    u: float
    delta: float


def _segment_distance(v1: float, v2: float, v3: float) -> float:
    """Distance from v2 to the segment [v1, v3]."""
    lo, hi = min(v1, v3), max(v1, v3)
    if lo <= v2 <= hi:
        return 0.0
    return min(abs(v2 - v1), abs(v2 - v3))


def _clip_window(window, t, delta):
    s, e = window
    return max(s, t - delta), min(e, t + delta)


def _step_segment_values(path: CadlagPath, wl: float, wr: float) -> list[float]:
    """Values of the non-empty pieces a step path takes on [wl, wr], in
    temporal order.  The final piece is closed at wr (it may be a single
    point when a breakpoint falls exactly on the window edge)."""
    ts, vs, m = path.times, path.values, len(path.times)
    out = []
    i0 = max(int(np.searchsorted(ts, wl, side="right")) - 1, 0)
    for i in range(i0, m):
        seg_hi = ts[i + 1] if i + 1 < m else path.end
        lo = max(float(ts[i]), wl)
        if lo > wr:
            break
        if wr < seg_hi or i + 1 == m:
            out.append(float(vs[i]))  # closed final piece, possibly a point
            break
        if lo < seg_hi:
            out.append(float(vs[i]))
    return out


def _linear_candidate_values(path: CadlagPath, wl: float, wr: float) -> list[float]:
    inner = path.times[(path.times > wl) & (path.times < wr)]
    cand = np.concatenate(([wl], inner, [wr]))
    return [path(float(t)) for t in cand]


def _window_values(path: CadlagPath, wl: float, wr: float) -> list[float]:
    if wl > wr:
        return []
    if path.kind == "step":
        return _step_segment_values(path, wl, wr)
    return _linear_candidate_values(path, wl, wr)


def _w_from_values(vals: list[float]) -> float:
    # max over ordered triples of the segment distance, O(len) via running
    # extremes: for each middle index the best flanks are the prefix/suffix
    # min (when the middle pokes above) or max (below).
    k = len(vals)
    if k < 3:
        return 0.0
    a = np.asarray(vals)
    pref_min = np.minimum.accumulate(a)
    pref_max = np.maximum.accumulate(a)
    suf_min = np.minimum.accumulate(a[::-1])[::-1]
    suf_max = np.maximum.accumulate(a[::-1])[::-1]
    mid = a[1:-1]
    up = mid - np.maximum(pref_min[:-2], suf_min[2:])
    down = np.minimum(pref_max[:-2], suf_max[2:]) - mid
    best = max(float(np.max(up)), float(np.max(down)))
    return max(best, 0.0)


def w_oscillation(path: CadlagPath, t: float, delta: float, window=None) -> float:
    """Largest distance from h(t2) to [h(t1), h(t3)] over ordered triples
    t1 < t2 < t3 inside the delta-window around t, clipped to ``window``."""
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    window = window or (path.start, path.end)
    wl, wr = _clip_window(window, t, delta)
    return _w_from_values(_window_values(path, wl, wr))


def v_oscillation(path: CadlagPath, t: float, delta: float, window=None) -> float:
    """Modulus of continuity around t: max |h(t2) - h(t1)| in the window."""
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    window = window or (path.start, path.end)
    wl, wr = _clip_window(window, t, delta)
    vals = _window_values(path, wl, wr)
    if not vals:
        return 0.0
    return max(vals) - min(vals)


def _w_sup_candidates(path: CadlagPath, delta: float, window) -> np.ndarray:
    # w(., delta) is piecewise constant in t between the points where a
    # window edge crosses a breakpoint; sampling every such point plus the
    # midpoints of consecutive ones realizes every piece.
    s, e = window
    pts = {s, e}
    for b in path.times:
        for c in (b - delta, b, b + delta):
            if s <= c <= e:
                pts.add(float(c))
    cand = np.array(sorted(pts))
    mids = (cand[:-1] + cand[1:]) / 2.0
    return np.concatenate((cand, mids))


def u_oscillation(path: CadlagPath, delta: float, window=None) -> OscillationReport:
    """Compose v at both window endpoints with the sup over t of w."""
    if delta <= 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    window = window or (path.start, path.end)
    s, e = window
    w_sup = 0.0
    for t in _w_sup_candidates(path, delta, window):
        w_sup = max(w_sup, w_oscillation(path, float(t), delta, window))
    v_start = v_oscillation(path, s, delta, window)
    v_end = v_oscillation(path, e, delta, window)
    return OscillationReport(
        w_sup=w_sup,
        v_start=v_start,
        v_end=v_end,
        u=max(v_start, v_end, w_sup),
        delta=delta,
    )


def _graph_polyline(path: CadlagPath) -> np.ndarray:
    """Vertices (t, x) of the completed graph traced left to right."""
    pts = [(path.start, path.start_value)]

    def push(t, x):
        if (t, x) != pts[-1]:
            pts.append((t, x))

    v = path.values
    if path.kind == "linear":
        for i in range(len(v)):
            push(float(path.times[i]), float(v[i]))
    else:
        push(path.start, float(v[0]))
        for i in range(1, len(v)):
            push(float(path.times[i]), float(v[i - 1]))  # horizontal run
            push(float(path.times[i]), float(v[i]))      # jump, if any
    push(path.end, float(v[-1]))
    return np.asarray(pts, dtype=float)


def _sample_polyline(poly: np.ndarray, resolution: int) -> np.ndarray:
    seg = np.abs(np.diff(poly, axis=0)).sum(axis=1)  # L1 arc length
    s = np.concatenate(([0.0], np.cumsum(seg)))
    total = s[-1]
    if total == 0.0:
        return poly[:1].repeat(resolution, axis=0)
    grid = np.union1d(s, np.linspace(0.0, total, resolution))
    t = np.interp(grid, s, poly[:, 0])
    x = np.interp(grid, s, poly[:, 1])
    return np.column_stack((t, x))


def m1_distance(h1: CadlagPath, h2: CadlagPath, resolution: int = 400) -> float:
    """Approximate M1 distance between two paths on the same domain.

    Discretizes a parametric representation of each completed graph with
    ``resolution`` samples and minimizes the max over the alignment of
    max(|value gap|, |time gap|) over monotone alignments by dynamic
    programming (a discrete Frechet distance).  The result upper-bounds the
    true M1 distance and tightens as resolution grows.
    """
    if (h1.start, h1.end) != (h2.start, h2.end):
        raise ValueError("paths must share a common domain")
    if resolution < max(len(h1.times), len(h2.times)):
        raise ValueError("resolution must be at least the breakpoint count")
    p = _sample_polyline(_graph_polyline(h1), resolution)
    q = _sample_polyline(_graph_polyline(h2), resolution)
    cost = np.maximum(np.abs(p[:, 0, None] - q[None, :, 0]),
                      np.abs(p[:, 1, None] - q[None, :, 1]))
    n, m = cost.shape
    d = np.empty_like(cost)
    d[0, 0] = cost[0, 0]
    for j in range(1, m):
        d[0, j] = max(d[0, j - 1], cost[0, j])
    row_prev = d[0]
    for i in range(1, n):
        row = d[i]
        row[0] = max(row_prev[0], cost[i, 0])
        ci = cost[i]
        for j in range(1, m):
            reach = min(row_prev[j], row_prev[j - 1], row[j - 1])
            row[j] = reach if reach > ci[j] else ci[j]
        row_prev = row
    return float(d[-1, -1])
