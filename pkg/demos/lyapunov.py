"""Lyapunov spectrum of the well-mixed kinetics and its Kaplan-Yorke dimension."""

from chemotax.core import Kinetics, ModelSpec, SignalKinetics, SpeciesParams
from chemotax.kinetics import KineticState, lyapunov_spectrum

spec = ModelSpec("ks_logistic", (SpeciesParams(1.0, 0.0, Kinetics.logistic(1.0, 1.0)),),
                 SignalKinetics((1.0,), 1.0, 1.0))
res = lyapunov_spectrum(spec, KineticState(0.5, 0.5), 1000.0)
print("exponents:", ", ".join(f"{x:.6f}" for x in res.exponents))
print("Kaplan-Yorke dimension:", res.d_ky)
rows = res.history_rows()
for t, l1, l2, _ in rows[:: max(1, len(rows) // 8)]:
    print(f"  t={t:7.1f}  {l1:+.5f}  {l2:+.5f}")
