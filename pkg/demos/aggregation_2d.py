"""Short 2D logistic Keller-Segel run from the shipped config.

Runs a reduced-resolution copy of configs/ks2d.yaml and reports how the
density contrast develops. Pass ``--full`` for the full 256^2 grid.
"""

import sys
from pathlib import Path

import numpy as np

from chemotax import config
from chemotax.simulate import run

full = "--full" in sys.argv
overrides = [] if full else ["grid.n=64", "dt=1.0e-3", "t_final=2.0", "snapshot_every=500"]
conf = config.load(Path(__file__).resolve().parents[1] / "configs" / "ks2d.yaml", overrides)
rec = run(conf.run)

print(rec.termination, f"in {rec.wallclock:.1f}s")
for t, y in zip(rec.times, rec.snapshots):
    u = y[0]
    print(f"t={t:6.3f}  min u={u.min():.4f}  max u={u.max():.4f}  var u={np.var(u):.3e}")
print("relative mass change (growth plus clipping):", float(rec.column("mass_1")[-1] / rec.column("mass_1")[0] - 1))
