"""Parameter sweeps, dispersion export and qualitative probes built on the run loop."""

from __future__ import annotations

import dataclasses
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import linstab
from .core import (Family, Grid, InitialCondition, ModelSpec, RunConfig, SignalKinetics,
                   SpeciesParams, homogeneous_steady_state)
from .errors import EmptyWindow, NotWellMixedStable
from .simulate import run

log = logging.getLogger(__name__)


@dataclass
class SweepResult:
    chis: np.ndarray
    max_u: np.ndarray
    max_v: np.ndarray
    max_w: np.ndarray
    terminated_early: np.ndarray
    transition_estimate: Optional[float] = None

    def rows(self):
        return np.column_stack([self.chis, self.max_u, self.max_v, self.max_w,
                                self.terminated_early.astype(int)])


def _sweep_point(args):
    cfg, chi, index = args
    cfg = dataclasses.replace(cfg, model=cfg.model.with_chi(chi, index))
    # CFL warnings are expected at large chi; log them instead of repeating per point
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rec = run(cfg)
    for w in caught:
        log.info("chi=%g: %s", chi, w.message)
    y = rec.final_state
    ns = cfg.model.n_species
    if not np.all(np.isfinite(y)):
        y = rec.snapshots[-1]
    max_v = float(np.max(y[ns]))
    max_w = float(np.max(y[ns + 1])) if y.shape[0] > ns + 1 else math.nan
    if rec.termination.completed:
        return float(np.max(y[:ns])), max_v, max_w, False
    return float(cfg.blowup_threshold), max_v, max_w, True


def transition_estimate(chis, max_u, factor=2.0):
    """First chi (ascending) whose ``max_u`` exceeds ``factor`` times the lowest-chi value."""
    order = np.argsort(chis, kind="stable")
    chis, max_u = np.asarray(chis)[order], np.asarray(max_u)[order]
    base = max_u[0]
    hit = np.nonzero(max_u > factor * base)[0]
    return float(chis[hit[0]]) if hit.size else None


def bifurcation_sweep(cfg: RunConfig, chi_values, workers=1, species_index=0) -> SweepResult:
    """Final-time maxima for each chi; every run uses the same grid, seed and dt.

    Runs are independent and may execute in a process pool; results are
    returned in ascending chi order regardless of completion order.
    """
    chis = np.sort(np.asarray(list(chi_values), dtype=float))
    jobs = [(cfg, float(c), species_index) for c in chis]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_sweep_point, jobs))
    else:
        out = [_sweep_point(j) for j in jobs]
    if not out:
        e = np.zeros(0)
        return SweepResult(chis, e, e, e, np.zeros(0, bool), None)
    mu, mv, mw, flag = (np.array(c) for c in zip(*out))
    return SweepResult(chis, mu, mv, mw, flag.astype(bool), transition_estimate(chis, mu))


def dispersion_export(spec: ModelSpec, chi_list, base=None, grid=None, k_hi=None,
                      n_samples=2048) -> np.ndarray:
    """Rows ``(chi, k, re_lambda, im_lambda, re_simplified)`` for each chi.

    ``re_simplified`` is ``Re(-D k^2 + sqrt((chi k^2)^2 - alpha beta))``, the
    reduced growth-rate formula, evaluated with the first species' parameters.
    """
    blocks = []
    sp, sig = spec.species[0], spec.signal
    for chi in chi_list:
        s = linstab.dispersion_scan(spec, chi=chi, base=base, grid=grid, k_hi=k_hi,
                                    n_samples=n_samples)
        simp = linstab.simplified_dispersion(s.ks, chi, sp.D, sig.alpha[0], sig.beta)
        blocks.append(np.column_stack([np.full(s.ks.shape, float(chi)), s.ks,
                                       s.re_lambda, s.im_lambda, simp]))
    return np.vstack(blocks) if blocks else np.zeros((0, 5))


@dataclass
class MassVerdict:
    mass: float
    ratio: float
    termination: str
    t_end: float
    sup_max: float

    @property
    def blew_up(self):
        return self.termination in ("blowup", "nonfinite")


def critical_mass_probe(D, chi, masses, grid: Grid, t_final, dt=1e-3, width=0.3,
                        stepper="etdrk4", blowup_threshold=1e4, D_v=1.0, alpha=1.0,
                        beta=1.0) -> list:
    """Run a growth-free 2D model from a Gaussian scaled to each total mass.

    The signal starts at zero. Verdicts are qualitative: bounded completion
    versus blow-up of the density maximum.
    """
    mc = linstab.critical_mass(D, chi)
    spec = ModelSpec(Family.KS_LOGISTIC, (SpeciesParams(D, chi),),
                     SignalKinetics((alpha,), beta, D_v))
    xs = grid.coords()
    c = grid.L / 2
    bump = np.exp(-sum((x - c) ** 2 for x in xs) / (2 * width ** 2))
    out = []
    for m in masses:
        u = bump * (m / grid.integrate(bump))
        cfg = RunConfig(grid, spec, stepper, dt=dt, t_final=t_final, snapshot_every=10 ** 9,
                        ic=InitialCondition.explicit([u, np.zeros_like(u)]),
                        blowup_threshold=blowup_threshold)
        rec = run(cfg)
        out.append(MassVerdict(float(m), float(m) / mc, rec.termination.kind,
                               rec.termination.t, float(np.max(rec.column("sup_u")))))
    return out


def masses_monotone(verdicts) -> bool:
    """True when blow-up at some mass implies blow-up at every larger mass."""
    vs = sorted(verdicts, key=lambda v: v.mass)
    seen = False
    for v in vs:
        if seen and not v.blew_up:
            return False
        seen = seen or v.blew_up
    return True


@dataclass
class HopfProbe:
    chi: float
    frequency: float
    peak_ratio: float
    oscillatory: bool
    predicted: Optional[linstab.HopfReport] = None
    series: np.ndarray = field(default=None, repr=False)


def oscillation_analysis(t, x, discard=0.5, ratio=5.0, rel_floor=1e-8):
    """Dominant nonzero frequency of a scalar series and its prominence.

    The first ``discard`` fraction is dropped. A series whose remaining spread
    is below ``rel_floor`` (relative) is non-oscillatory, as is one whose
    peak sits in the lowest bin (less than two periods in the window).
    """
    t = np.asarray(t, float)
    x = np.asarray(x, float)
    i0 = int(len(x) * discard)
    t, x = t[i0:], x[i0:]
    if len(x) < 8:
        raise EmptyWindow("series too short for spectral analysis")
    level = abs(x.mean())
    x = x - x.mean()
    if np.max(np.abs(x)) <= rel_floor * max(1.0, level):
        return 0.0, 0.0, False
    amp = np.abs(np.fft.rfft(x * np.hanning(len(x))))[1:]
    freqs = np.fft.rfftfreq(len(x), t[1] - t[0])[1:]
    j = int(np.argmax(amp))
    bg = float(np.median(amp))
    pr = float(amp[j] / bg) if bg > 0 else math.inf
    return float(freqs[j]), pr, bool(pr >= ratio and j >= 1)


def hopf_probe(spec: ModelSpec, chi, t_final, grid: Grid, dt=0.01, stepper="fdm_euler",
               amplitude=1e-2, seed=0) -> HopfProbe:
    """Run a 1D model and look for sustained oscillation of the midpoint density."""
    spec = spec.with_chi(chi)
    base = homogeneous_steady_state(spec)
    cfg = RunConfig(grid, spec, stepper, dt=dt, t_final=t_final, snapshot_every=10 ** 9,
                    ic=InitialCondition.uniform_noise(base, amplitude), rng_seed=seed,
                    record_midpoint=True)
    rec = run(cfg)
    t = rec.column("t")
    u = rec.column(f"{rec.field_names[0]}_mid")
    f, pr, osc = oscillation_analysis(t, u)
    try:
        kc = linstab.turing_threshold(spec).k_c
    except NotWellMixedStable:
        kc = 0.0
    pred = linstab.hopf_criterion_kinetic(spec, kc)
    return HopfProbe(float(chi), f, pr, osc, pred, np.column_stack([t, u]))


def fit_growth_rate(t, amp, max_amp=1e-3, skip_fraction=0.25):
    """Least-squares slope of ``log amp`` over the linear window.

    The window ends where ``amp`` first exceeds ``max_amp``; its first
    ``skip_fraction`` is dropped to let non-modal transients decay.
    """
    t = np.asarray(t, float)
    amp = np.asarray(amp, float)
    over = np.nonzero(amp > max_amp)[0]
    end = over[0] if over.size else len(amp)
    start = int(end * skip_fraction)
    if end - start < 3:
        raise EmptyWindow("fewer than three samples inside the linear window")
    return float(np.polyfit(t[start:end], np.log(amp[start:end]), 1)[0])
