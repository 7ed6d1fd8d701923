"""Second-order finite differences with Neumann (ghost mirror) or periodic closure."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Grid, RunConfig


@dataclass(frozen=True)
class Stencil:
    """Finite-difference operators bound to a grid.

    Neumann grids are vertex centred: ghost values mirror the first interior
    node (``u[-1] = u[1]``), which is zero normal derivative at the wall.
    """

    grid: Grid

    @property
    def _mode(self):
        return "wrap" if self.grid.periodic else "reflect"

    def _pad(self, f, axis):
        pad = [(0, 0)] * f.ndim
        pad[axis] = (1, 1)
        return np.pad(f, pad, mode=self._mode)

    def _axes(self, f):
        return range(f.ndim - self.grid.dim, f.ndim)

    @staticmethod
    def _sl(f, axis, a, b):
        s = [slice(None)] * f.ndim
        s[axis] = slice(a, b)
        return tuple(s)

    def laplacian(self, f):
        dx2 = self.grid.dx ** 2
        out = np.zeros_like(f, dtype=float)
        for ax in self._axes(f):
            g = self._pad(f, ax)
            out += (g[self._sl(g, ax, 0, -2)] - 2 * f + g[self._sl(g, ax, 2, None)]) / dx2
        return out

    def grad(self, f):
        """Central-difference gradient, shape ``(dim, *shape)``."""
        dx = self.grid.dx
        comps = []
        for ax in self._axes(f):
            g = self._pad(f, ax)
            comps.append((g[self._sl(g, ax, 2, None)] - g[self._sl(g, ax, 0, -2)]) / (2 * dx))
        return np.stack(comps)

    def chemotaxis_div(self, u, v, chi):
        """``chi * div(u grad v)`` from face-averaged fluxes."""
        dx = self.grid.dx
        out = np.zeros_like(u, dtype=float)
        for ax in self._axes(u):
            gu = self._pad(u, ax)
            gv = self._pad(v, ax)
            lo = self._sl(gu, ax, 0, -1)
            hi = self._sl(gu, ax, 1, None)
            # flux on every face between padded neighbours
            flux = 0.5 * (gu[hi] + gu[lo]) * (gv[hi] - gv[lo]) / dx
            out += (flux[self._sl(flux, ax, 1, None)] - flux[self._sl(flux, ax, 0, -1)]) / dx
        return chi * out


def cfl_limits(cfg: RunConfig, sup_u, w_max=0.0) -> dict:
    """Explicit-Euler time-step bounds for diffusion, chemotaxis and advection."""
    grid, spec = cfg.grid, cfg.model
    dx = grid.dx
    diffs = [sp.D for sp in spec.species] + [spec.signal.D_v]
    if spec.fluid is not None:
        diffs.append(spec.fluid.nu)
    out = {"dt_diffusion": dx * dx / (2 * grid.dim * max(diffs))}
    chi = max(abs(sp.chi) for sp in spec.species)
    out["dt_chemotaxis"] = math.inf if chi == 0 or sup_u <= 0 else 0.25 * dx * dx / (chi * sup_u)
    out["dt_advection"] = math.inf if w_max <= 0 else 0.5 * dx / w_max
    return out
