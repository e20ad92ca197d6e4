"""Counter-based noise streams for reproducible parallel Monte Carlo.

Every random draw in a run comes from a Philox generator keyed by
``(seed, region, purpose)``.  The key fully determines the stream, so a
particle's Brownian path depends only on the run seed, its region and its
index within the per-step block of draws -- never on scheduling, worker
count, or what other configs were run before.  Two configs sharing a seed
therefore drive particle i of region r with the *same* noise, which is what
the coupled-vs-decoupled comparison experiments rely on.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# purpose tags; one substream per (region, purpose)
INIT = 0
GAUSS = 1
BRIDGE = 2


def substream(seed: int, region: int, purpose: int) -> np.random.Generator:
    """Return the generator for one (seed, region, purpose) slot."""
    if region < 0:
        raise ValueError("region index must be non-negative")
    key = np.array([seed & _MASK64, ((region << 3) | purpose) & _MASK64],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
