"""Feel out the path functionals on hand-built cadlag paths.

w ignores monotone moves entirely (a pure jump costs nothing in M1), while
v charges for any variation; the M1 distance between two steps offset in
time is just the offset, because the parametric representations may slide
along the time axis.
"""

import numpy as np

from cascadesim import (CadlagPath, m1_distance, u_oscillation, v_oscillation,
                        w_oscillation)


def step(times, values, end):
    return CadlagPath(times=np.array(times, float),
                      values=np.array(values, float),
                      start_value=float(values[0]), end=end, kind="step")


ramp = step([0.0, 0.2, 0.4, 0.6, 0.8], [0.0, 0.1, 0.3, 0.6, 1.0], end=1.0)
spike = step([0.0, 0.45, 0.55], [0.0, 1.0, 0.0], end=1.0)

for name, h in (("monotone ramp", ramp), ("spike", spike)):
    rep = u_oscillation(h, 0.2)
    print(f"{name:14s} w_sup={rep.w_sup:.3f} v_start={rep.v_start:.3f} "
          f"v_end={rep.v_end:.3f} u={rep.u:.3f}")

print()
print("distance from the spike to its own peak window:",
      f"w={w_oscillation(spike, 0.5, 0.2):.3f}",
      f"v={v_oscillation(spike, 0.5, 0.2):.3f}")

print()
one = step([0.0, 0.5], [0.0, 1.0], end=1.0)
for eps in (0.2, 0.1, 0.05, 0.01):
    other = step([0.0, 0.5 + eps], [0.0, 1.0], end=1.0)
    d = m1_distance(one, other, resolution=600)
    print(f"unit steps {eps:.2f} apart: m1 distance {d:.4f}")

print()
print("extending a path freezes its endpoints:")
ext = spike.extended(1.0)
print(f"  v at the extended start: {v_oscillation(ext, ext.start, 0.5):.3f} "
      f"(constant pre-history)")
