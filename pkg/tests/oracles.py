"""Independent reference computations for the test suite.

Everything here deliberately ignores how the library computes the same
quantities: brute-force scans, dense-grid enumeration, throwaway
single-particle simulation.  Keeping them naive is the point.
"""

import numpy as np


def jump_size_by_scan(measure, scale, n, x_hi=None, steps=100_001):
    """inf{x > 0 : scale * #(measure in [0, x]) / n < x} by scanning x.

    Returns the first grid x where the defining inequality holds; exact up
    to the scan resolution.  The inf can never exceed ``scale`` (the mass in
    the window is at most 1), so the scan stops there.
    """
    a = np.asarray(measure, dtype=float)
    if x_hi is None:
        x_hi = scale + 0.01
    xs = np.linspace(1e-12, x_hi, steps)
    mass = np.searchsorted(np.sort(a[a >= 0.0]), xs, side="right")
    hit = np.flatnonzero(scale * mass / n < xs)
    return float(xs[hit[0]]) if hit.size else x_hi


def grid_w_oscillation(times, values, t, delta, window, grid):
    """Brute-force w over all ordered grid triples inside the clipped window.

    ``grid`` must be a sorted array of candidate times; the path is the step
    function times/values evaluated right-continuously.  Every triple
    (a, b, c) with a < b < c is enumerated via broadcasting.
    """
    lo = max(window[0], t - delta)
    hi = min(window[1], t + delta)
    pts = grid[(grid >= lo) & (grid <= hi)]
    if pts.size < 3:
        return 0.0
    h = values[np.searchsorted(times, pts, side="right") - 1]
    k = h.size
    a = h[:, None, None]
    b = h[None, :, None]
    c = h[None, None, :]
    outside = (b < np.minimum(a, c)) | (b > np.maximum(a, c))
    dist = np.where(outside, np.minimum(np.abs(b - a), np.abs(b - c)), 0.0)
    i, j, l = np.ogrid[:k, :k, :k]
    dist[~((i < j) & (j < l))] = 0.0
    return float(dist.max())


def grid_v_oscillation(times, values, t, delta, window, grid):
    lo = max(window[0], t - delta)
    hi = min(window[1], t + delta)
    pts = grid[(grid >= lo) & (grid <= hi)]
    if pts.size == 0:
        return 0.0
    h = values[np.searchsorted(times, pts, side="right") - 1]
    return float(h.max() - h.min())


def single_particle_default_prob(law, scale_free_draws, t_grid_steps, dt, rng,
                                 n_paths):
    """Monte Carlo default probability by time T for one absorbed walk with
    no interaction, same grid-hit scheme as the engine but written straight.
    """
    x = law.sample(n_paths, rng)
    alive = np.ones(n_paths, dtype=bool)
    sqrt_dt = np.sqrt(dt)
    for _ in range(t_grid_steps):
        x = np.where(alive, x + rng.standard_normal(n_paths) * sqrt_dt, x)
        alive &= x > 0.0
    return 1.0 - alive.mean()
