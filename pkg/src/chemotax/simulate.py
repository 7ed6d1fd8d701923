"""Time steppers, the run loop and per-step diagnostics."""

from __future__ import annotations

import logging
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import spectral
from .core import Family, Grid, ModelSpec, RunConfig, field_names, initial_state, validate
from .errors import ConfigError, NonFinite, UnsupportedBoundary
from .fdm import cfl_limits
from .models import Model

log = logging.getLogger(__name__)

U_FLOOR = 1e-12


@dataclass(frozen=True)
class Termination:
    kind: str  # "completed", "blowup" or "nonfinite"
    t: float
    step: int

    @property
    def completed(self):
        return self.kind == "completed"

    def __str__(self):
        if self.kind == "blowup":
            return f"BlowUp(t_max_estimate={self.t:.6g})"
        if self.kind == "nonfinite":
            return f"NonFinite(t={self.t:.6g})"
        return "Completed"


@dataclass
class RunRecord:
    cfg: RunConfig
    field_names: tuple
    times: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    columns: tuple = ()
    series: np.ndarray = None
    termination: Termination = None
    wallclock: float = 0.0
    final_state: Optional[np.ndarray] = None

    def column(self, name):
        return self.series[:, self.columns.index(name)]


# --- diagnostics -----------------------------------------------------------

def mass(y, grid: Grid, n_species=1):
    """Integral of each species density (trapezoid weights on Neumann grids)."""
    return [grid.integrate(y[i]) for i in range(n_species)]


def entropy(y, spec: ModelSpec, grid: Grid):
    """``sum_i int(u_i log u_i - u_i + (chi_i/D_i) u_i v) + int v^2/2``."""
    ns = spec.n_species
    v = y[ns]
    dens = 0.5 * v * v
    for ui, sp in zip(y[:ns], spec.species):
        uf = np.maximum(ui, U_FLOOR)
        dens = dens + uf * np.log(uf) - uf + (sp.chi / sp.D) * ui * v
    return grid.integrate(dens)


def free_energy(y, spec: ModelSpec, grid: Grid, plan=None):
    """``int(u ln u - u) - chi/(2 beta) int u phi`` with ``-Lap phi = u - mean(u)``."""
    if not grid.periodic:
        raise UnsupportedBoundary("free energy uses the periodic Green's function")
    plan = plan or spectral.build_plan(grid)
    u = y[0]
    sp, beta = spec.species[0], spec.signal.beta
    uf = np.maximum(u, U_FLOOR)
    part = grid.integrate(uf * np.log(uf) - uf)
    if sp.chi == 0:
        return part
    phi = spectral.poisson_solve_periodic(plan, u)
    return part - sp.chi / (2 * beta) * grid.integrate(u * phi)


def second_moment(y, grid: Grid, n_species=1):
    """``int |x - x_c|^2 u`` about the domain centre, summed over species."""
    xc = grid.L / 2
    r2 = sum((x - xc) ** 2 for x in grid.coords())
    u = np.sum(y[:n_species], axis=0)
    return grid.integrate(r2 * u)


# --- steppers ----------------------------------------------------------------

def _check(y):
    if not np.all(np.isfinite(y)):
        raise NonFinite("state contains NaN or Inf")
    return y


def _clip(y, clip, ns):
    if clip is not None:
        np.clip(y[:ns], clip[0], clip[1], out=y[:ns])
    return y


def step_fdm_euler(model: Model, y, dt, clip=None):
    """Forward Euler on the full RHS."""
    y = y + dt * model.rhs(y)
    return _check(_clip(y, clip, model.spec.n_species))


def _propagators(model: Model, plan, dt):
    return np.stack([spectral.linear_propagator(plan, d, b, dt) for d, b in model.split.coeffs])


def step_ssfm(model: Model, plan, y, dt, dealias=False, clip=None, prop=None):
    """Lie splitting: exact linear flow, then one explicit Euler step of the remainder."""
    if prop is None:
        prop = _propagators(model, plan, dt)
    ys = plan.inverse(prop * plan.forward(y))
    if dealias:
        y = plan.inverse(plan.forward(ys) + dt * plan.dealias(plan.forward(model.nonlinear(ys))))
    else:
        y = ys + dt * model.nonlinear(ys)
    return _check(_clip(y, clip, model.spec.n_species))


def etdrk4_table(model: Model, plan, dt, M=16) -> spectral.Etdrk4Coeffs:
    L = np.stack([-(d * plan.k2 + b) for d, b in model.split.coeffs])
    return spectral.etdrk4_coeffs_for(L, dt, M)


def step_etdrk4(model: Model, plan, y, dt, dealias=True, clip=None, coeffs=None):
    """Fourth-order exponential time differencing Runge-Kutta step."""
    c = coeffs if coeffs is not None else etdrk4_table(model, plan, dt)

    def N(vh):
        nh = plan.forward(model.nonlinear(plan.inverse(vh)))
        return plan.dealias(nh) if dealias else nh

    vh = plan.forward(y)
    Nv = N(vh)
    a = c.E2 * vh + c.Q * Nv
    Na = N(a)
    b = c.E2 * vh + c.Q * Na
    Nb = N(b)
    cc = c.E2 * a + c.Q * (2 * Nb - Nv)
    Nc = N(cc)
    vh = c.E * vh + c.f1 * Nv + 2 * c.f2 * (Na + Nb) + c.f3 * Nc
    y = plan.inverse(vh)
    return _check(_clip(y, clip, model.spec.n_species))


class Integrator:
    """Binds a stepper, its model and cached coefficients for a fixed ``dt``."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        backend = "spectral" if cfg.stepper.spectral else "fdm"
        self.model = Model(cfg.model, cfg.grid, backend)
        self.plan = self.model.ops.plan
        self.dealias = cfg.use_dealias
        self._cache = {}
        self._cfl_warned = False

    def step(self, y, dt=None):
        dt = self.cfg.dt if dt is None else dt
        kind = self.cfg.stepper.value
        if dt == 0:
            return y.copy()
        if kind == "fdm_euler":
            self._cfl_check(y, dt)
            return step_fdm_euler(self.model, y, dt, self.cfg.clip)
        key = (kind, dt)
        if key not in self._cache:
            if kind == "ssfm":
                self._cache[key] = _propagators(self.model, self.plan, dt)
            else:
                self._cache[key] = etdrk4_table(self.model, self.plan, dt)
        if kind == "ssfm":
            return step_ssfm(self.model, self.plan, y, dt, self.dealias, self.cfg.clip,
                             self._cache[key])
        return step_etdrk4(self.model, self.plan, y, dt, self.dealias, self.cfg.clip,
                           self._cache[key])

    def _cfl_check(self, y, dt):
        if self._cfl_warned:
            return
        ns = self.model.spec.n_species
        w = self.model.velocity(y)
        wmax = float(np.max(np.abs(w))) if w is not None else 0.0
        lim = cfl_limits(self.cfg, float(np.max(y[:ns])), wmax)
        bad = {k: v for k, v in lim.items() if dt > v}
        if bad:
            self._cfl_warned = True
            warnings.warn(f"dt={dt} exceeds explicit stability limits {bad}", RuntimeWarning,
                          stacklevel=3)


def series_columns(cfg: RunConfig) -> tuple:
    spec, grid = cfg.model, cfg.grid
    cols = ["t"] + [f"mass_{i + 1}" for i in range(spec.n_species)] + ["sup_u", "entropy"]
    if _has_free_energy(spec, grid):
        cols.append("free_energy")
    cols.append("second_moment")
    if cfg.record_midpoint:
        cols += [f"{n}_mid" for n in field_names(spec)]
    return tuple(cols)


def _has_free_energy(spec, grid):
    return grid.periodic and spec.n_species == 1 and spec.signal.beta > 0


def diagnostics_row(t, y, cfg: RunConfig, plan=None) -> list:
    spec, grid = cfg.model, cfg.grid
    ns = spec.n_species
    row = [t] + mass(y, grid, ns) + [float(np.max(y[:ns])), entropy(y, spec, grid)]
    if _has_free_energy(spec, grid):
        row.append(free_energy(y, spec, grid, plan))
    row.append(second_moment(y, grid, ns))
    if cfg.record_midpoint:
        mid = grid.midpoint_index
        row += [float(f[mid]) for f in y]
    return row


def run(cfg: RunConfig, y0=None) -> RunRecord:
    """Integrate ``cfg`` to ``t_final``, recording scalars every step.

    Snapshots are kept at t=0, every ``snapshot_every`` steps and at the last
    step. The loop stops early with ``blowup`` when ``max u`` reaches
    ``blowup_threshold`` and with ``nonfinite`` when NaN/Inf appears; neither
    raises.
    """
    problems = validate(cfg.model, cfg.grid, cfg)
    if problems:
        raise ConfigError("; ".join(problems))
    t0 = time.perf_counter()
    integ = Integrator(cfg)
    plan = integ.plan if cfg.grid.periodic else None
    ns = cfg.model.n_species
    y = initial_state(cfg) if y0 is None else np.array(y0, dtype=float)
    rec = RunRecord(cfg, field_names(cfg.model), columns=series_columns(cfg))
    rows = [diagnostics_row(0.0, y, cfg, plan)]
    rec.times.append(0.0)
    rec.steps.append(0)
    rec.snapshots.append(y.copy())
    n = cfg.n_steps
    term = Termination("completed", n * cfg.dt, n)
    # overflow on the way to blow-up is reported through the termination field
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n + 1):
            t = k * cfg.dt
            try:
                y = integ.step(y)
            except NonFinite:
                term = Termination("nonfinite", t, k)
                log.info("non-finite state at step %d", k)
                break
            rows.append(diagnostics_row(t, y, cfg, plan))
            sup = float(np.max(y[:ns]))
            if sup >= cfg.blowup_threshold:
                term = Termination("blowup", t, k)
                rec.times.append(t)
                rec.steps.append(k)
                rec.snapshots.append(y.copy())
                break
            if k % cfg.snapshot_every == 0 or k == n:
                rec.times.append(t)
                rec.steps.append(k)
                rec.snapshots.append(y.copy())
    rec.series = np.array(rows)
    rec.termination = term
    rec.final_state = y
    rec.wallclock = time.perf_counter() - t0
    return rec


def max_abs_divergence(cfg: RunConfig, y) -> tuple:
    """``(max |div w|, max |omega|)`` for a fluid2d state."""
    if cfg.model.family is not Family.FLUID2D:
        raise ValueError("divergence check applies to fluid2d states")
    model = Model(cfg.model, cfg.grid, "spectral")
    w = model.velocity(y)
    div = spectral.divergence(model.ops.plan, w)
    return float(np.max(np.abs(div))), float(np.max(np.abs(y[2])))
