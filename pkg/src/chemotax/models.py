"""Right-hand sides for the four model families, full and split into linear + nonlinear."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import spectral
from .core import Family, Grid, ModelSpec
from .errors import UnsupportedBoundary
from .fdm import Stencil
from .kinetics import reaction_u


class FdOps:
    """Finite-difference backend."""

    kind = "fdm"

    def __init__(self, grid: Grid):
        self.grid = grid
        self.st = Stencil(grid)
        self.plan = spectral.build_plan(grid) if grid.periodic else None

    def laplacian(self, f):
        return self.st.laplacian(f)

    def grad(self, f):
        return self.st.grad(f)

    def chemotaxis_div(self, u, v, chi):
        return self.st.chemotaxis_div(u, v, chi)

    def poisson(self, rhs):
        if self.plan is None:
            raise UnsupportedBoundary("streamfunction solve needs a periodic grid")
        return spectral.poisson_solve_periodic(self.plan, rhs)


class SpectralOps:
    """Pseudo-spectral backend (periodic only)."""

    kind = "spectral"

    def __init__(self, grid: Grid):
        self.grid = grid
        self.plan = spectral.build_plan(grid)

    def laplacian(self, f):
        return spectral.laplacian(self.plan, f)

    def grad(self, f):
        return spectral.grad(self.plan, f)

    def chemotaxis_div(self, u, v, chi):
        return chi * spectral.divergence(self.plan, u * spectral.grad(self.plan, v))

    def poisson(self, rhs):
        return spectral.poisson_solve_periodic(self.plan, rhs)


def make_ops(grid: Grid, kind="spectral"):
    return SpectralOps(grid) if kind == "spectral" else FdOps(grid)


def velocity_from_vorticity(ops, omega):
    """Streamfunction ``-Lap(psi) = omega`` and velocity ``(psi_y, -psi_x)``."""
    psi = ops.poisson(omega)
    g = ops.grad(psi)
    return np.stack([g[1], -g[0]])


def _advect(ops, w, c):
    """``w . grad c`` for a velocity with one component per grid axis."""
    g = ops.grad(c)
    return sum(wi * gi for wi, gi in zip(w, g))


def _vorticity_source(spec: ModelSpec, ops, u):
    gx, gy = spec.fluid.gravity_axis
    du = ops.grad(u)
    # z-component of e_g x grad u
    return spec.fluid.kappa * (gx * du[1] - gy * du[0])


def rhs_ks_logistic(y, spec: ModelSpec, ops):
    u, v = y
    sp, sig = spec.species[0], spec.signal
    du = sp.D * ops.laplacian(u) - ops.chemotaxis_div(u, v, sp.chi) + reaction_u(u, sp.kinetics)
    dv = sig.D_v * ops.laplacian(v) + sig.alpha[0] * u - sig.beta * v
    return np.stack([du, dv])


def rhs_two_species(y, spec: ModelSpec, ops):
    u1, u2, v = y
    sig = spec.signal
    out = []
    for ui, sp in zip((u1, u2), spec.species):
        out.append(sp.D * ops.laplacian(ui) - ops.chemotaxis_div(ui, v, sp.chi)
                   + reaction_u(ui, sp.kinetics))
    out.append(sig.D_v * ops.laplacian(v) + sig.alpha[0] * u1 + sig.alpha[1] * u2 - sig.beta * v)
    return np.stack(out)


def rhs_fluid_1d(y, spec: ModelSpec, ops):
    u, v, w = y
    base = rhs_ks_logistic(y[:2], spec, ops)
    wv = (w,)
    du = base[0] - _advect(ops, wv, u)
    dv = base[1] - _advect(ops, wv, v)
    dw = spec.fluid.nu * ops.laplacian(w) + spec.fluid.kappa * u
    return np.stack([du, dv, dw])


def rhs_fluid_2d(y, spec: ModelSpec, ops):
    if not ops.grid.periodic:
        raise UnsupportedBoundary("vorticity form needs a periodic grid")
    u, v, om = y
    w = velocity_from_vorticity(ops, om)
    base = rhs_ks_logistic(y[:2], spec, ops)
    du = base[0] - _advect(ops, w, u)
    dv = base[1] - _advect(ops, w, v)
    dom = (spec.fluid.nu * ops.laplacian(om) - _advect(ops, w, om)
           + _vorticity_source(spec, ops, u))
    return np.stack([du, dv, dom])


_FULL = {
    Family.KS_LOGISTIC: rhs_ks_logistic,
    Family.TWO_SPECIES: rhs_two_species,
    Family.FLUID1D: rhs_fluid_1d,
    Family.FLUID2D: rhs_fluid_2d,
}


def linear_coefficients(spec: ModelSpec) -> list:
    """Per-field ``(diffusivity, decay)`` so that ``L c = d Lap c - decay c``."""
    out = [(sp.D, 0.0) for sp in spec.species]
    out.append((spec.signal.D_v, spec.signal.beta))
    if spec.family in (Family.FLUID1D, Family.FLUID2D):
        out.append((spec.fluid.nu, 0.0))
    return out


def nonlinear_part(y, spec: ModelSpec, ops):
    """Everything in the RHS not covered by ``linear_coefficients``."""
    fam = spec.family
    sig = spec.signal
    ns = spec.n_species
    us, v = y[:ns], y[ns]
    out = [-ops.chemotaxis_div(ui, v, sp.chi) + reaction_u(ui, sp.kinetics)
           for ui, sp in zip(us, spec.species)]
    out.append(sum(a * ui for a, ui in zip(sig.alpha, us)))
    if fam is Family.FLUID1D:
        w = (y[2],)
        out[0] = out[0] - _advect(ops, w, y[0])
        out[1] = out[1] - _advect(ops, w, y[1])
        out.append(spec.fluid.kappa * y[0])
    elif fam is Family.FLUID2D:
        w = velocity_from_vorticity(ops, y[2])
        out[0] = out[0] - _advect(ops, w, y[0])
        out[1] = out[1] - _advect(ops, w, y[1])
        out.append(-_advect(ops, w, y[2]) + _vorticity_source(spec, ops, y[0]))
    return np.stack(out)


@dataclass
class SplitRhs:
    coeffs: list
    nonlinear: Callable

    def linear(self, y, ops):
        return np.stack([d * ops.laplacian(c) - b * c for (d, b), c in zip(self.coeffs, y)])


class Model:
    """A model family bound to a grid and an operator backend."""

    def __init__(self, spec: ModelSpec, grid: Grid, backend="spectral"):
        if spec.family is Family.FLUID2D and not grid.periodic:
            raise UnsupportedBoundary("fluid2d needs a periodic grid")
        self.spec = spec
        self.grid = grid
        self.ops = make_ops(grid, backend)
        self._full = _FULL[spec.family]
        self.split = SplitRhs(linear_coefficients(spec), self.nonlinear)

    def rhs(self, y):
        return self._full(y, self.spec, self.ops)

    def nonlinear(self, y):
        return nonlinear_part(y, self.spec, self.ops)

    def linear(self, y):
        return self.split.linear(y, self.ops)

    def velocity(self, y):
        """Advecting velocity field, or ``None`` for families without flow."""
        fam = self.spec.family
        if fam is Family.FLUID1D:
            return y[2][None]
        if fam is Family.FLUID2D:
            return velocity_from_vorticity(self.ops, y[2])
        return None
