"""Solve a flat-interface problem and compare the normal-derivative jump with g."""

import numpy as np

from translab.flat import FlatSlab, flat_solve, normal_jump
from translab.potential import DensityField

slab = FlatSlab(0.6, 0.1, 2)
g = DensityField.holder(1.0, 0.1, 0.6)
v = flat_solve(slab, g)
for xp in (0.0, 0.15, -0.3):
    x = np.array([xp, slab.height])
    jump, err = normal_jump(v, x, 0.05 * slab.radius)
    print(f"x'={xp:+.2f}  jump={jump:.6f}  g={float(g(x[None])[0]):.6f}  extrapolation error={err:.1e}")
