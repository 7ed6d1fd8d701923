"""Sub- versus super-critical mass in 2D without growth."""

from chemotax import experiments, linstab
from chemotax.core import Grid

D, chi = 1.0, 1.0
mc = linstab.critical_mass(D, chi)
print(f"critical mass 8 pi D / chi = {mc:.4f}")

grid = Grid(2, 128, 10.0)
verdicts = experiments.critical_mass_probe(D, chi, [0.5 * mc, 1.5 * mc, 3 * mc], grid,
                                           t_final=1.0, dt=1e-3)
for v in verdicts:
    print(f"M/M_c = {v.ratio:.1f}: {v.termination:9s} t_end={v.t_end:.3f} "
          f"max u={v.sup_max:.3g}")
print("monotone in mass:", experiments.masses_monotone(verdicts))
