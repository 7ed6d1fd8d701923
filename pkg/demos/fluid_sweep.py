"""Bifurcation sweep of the 1D chemotaxis-fluid model over chi.

Uses configs/fluid1d_sweep.yaml. Set CHEMOTAX_WORKERS to run points in parallel.
"""

import os
from pathlib import Path

from chemotax import config, experiments

conf = config.load(Path(__file__).resolve().parents[1] / "configs" / "fluid1d_sweep.yaml")
workers = int(os.environ.get("CHEMOTAX_WORKERS", "1"))
res = experiments.bifurcation_sweep(conf.run, config.sweep_chis(conf.sweep), workers=workers)

print(" chi    max_u      max_w   early")
for chi, mu, mv, mw, early in res.rows():
    print(f"{chi:4.1f} {mu:10.4g} {mw:10.4g}   {int(early)}")
print("transition estimate:", res.transition_estimate)
