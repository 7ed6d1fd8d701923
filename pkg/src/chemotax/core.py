"""Domain types, grids, run configuration and parameter validation."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import MissingKinetics


class Family(str, Enum):
    KS_LOGISTIC = "ks_logistic"
    TWO_SPECIES = "two_species"
    FLUID1D = "fluid1d"
    FLUID2D = "fluid2d"


class Boundary(str, Enum):
    NEUMANN = "neumann"
    PERIODIC = "periodic"


class Stepper(str, Enum):
    FDM_EULER = "fdm_euler"
    SSFM = "ssfm"
    ETDRK4 = "etdrk4"

    @property
    def spectral(self):
        return self is not Stepper.FDM_EULER


@dataclass(frozen=True)
class Kinetics:
    """Reaction term of a species: ``none``, ``logistic`` or ``allee``."""

    variant: str = "none"
    r: float = 0.0
    K: float = 1.0
    A: Optional[float] = None

    @classmethod
    def logistic(cls, r, K):
        return cls("logistic", float(r), float(K))

    @classmethod
    def allee(cls, r, K, A):
        return cls("allee", float(r), float(K), float(A))

    @property
    def active(self):
        return self.variant != "none"


@dataclass(frozen=True)
class SignalKinetics:
    """Production ``alpha_i`` per species, decay ``beta`` and diffusivity ``D_v``."""

    alpha: tuple
    beta: float
    D_v: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in np.atleast_1d(self.alpha)))


@dataclass(frozen=True)
class SpeciesParams:
    D: float
    chi: float
    kinetics: Kinetics = field(default_factory=Kinetics)


@dataclass(frozen=True)
class FluidParams:
    nu: float
    kappa: float
    gravity_axis: tuple = (0.0, -1.0)


@dataclass(frozen=True)
class ModelSpec:
    family: Family
    species: tuple
    signal: SignalKinetics
    fluid: Optional[FluidParams] = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "species", tuple(self.species))

    @property
    def n_species(self):
        return len(self.species)

    @property
    def field_names(self):
        return field_names(self)

    def with_chi(self, chi, index=0):
        """Copy with the sensitivity of species ``index`` replaced."""
        sp = list(self.species)
        sp[index] = dataclasses.replace(sp[index], chi=float(chi))
        return dataclasses.replace(self, species=tuple(sp))


def field_names(spec):
    fam = Family(spec.family)
    if fam is Family.TWO_SPECIES:
        return ("u1", "u2", "v")
    if fam is Family.FLUID1D:
        return ("u", "v", "w")
    if fam is Family.FLUID2D:
        return ("u", "v", "omega")
    return ("u", "v")


@dataclass(frozen=True)
class Grid:
    """Uniform 1D/2D mesh on ``[0, L]^dim``.

    Periodic grids exclude the right endpoint (``dx = L/n``); Neumann grids
    include both endpoints (``dx = L/(n-1)``).
    """

    dim: int
    n: int
    L: float
    bc: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        object.__setattr__(self, "bc", Boundary(self.bc))

    @property
    def periodic(self):
        return self.bc is Boundary.PERIODIC

    @property
    def dx(self):
        return self.L / self.n if self.periodic else self.L / (self.n - 1)

    @property
    def shape(self):
        return (self.n,) * self.dim

    @property
    def x(self):
        return np.arange(self.n) * self.dx

    def coords(self):
        """Coordinate arrays with ``indexing='ij'`` (axis 0 is x)."""
        if self.dim == 1:
            return (self.x,)
        return tuple(np.meshgrid(self.x, self.x, indexing="ij"))

    @property
    def weights(self):
        """Quadrature weights: ``dx^d`` per node, halved on Neumann end nodes."""
        w = np.full(self.n, self.dx)
        if not self.periodic:
            w[0] *= 0.5
            w[-1] *= 0.5
        if self.dim == 1:
            return w
        return np.outer(w, w)

    def integrate(self, f):
        return float(np.sum(f * self.weights))

    @property
    def volume(self):
        return self.L ** self.dim

    @property
    def midpoint_index(self):
        return (self.n // 2,) * self.dim


@dataclass(frozen=True)
class InitialCondition:
    """Initial field recipe.

    ``uniform_noise``: ``base`` value per field plus uniform noise of half-width
    ``amplitude`` on every field. ``gaussian``: ``base + peak*exp(-|x-c|^2/(2 width^2))``
    per field, noise on the species only. ``explicit``: ``arrays`` used verbatim.
    Densities (species and signal) are clamped at zero after noise is added.
    """

    variant: str = "uniform_noise"
    base: tuple = ()
    amplitude: float = 0.0
    center: Optional[tuple] = None
    width: float = 1.0
    peak: tuple = ()
    arrays: Optional[tuple] = None

    @classmethod
    def uniform_noise(cls, base, amplitude):
        return cls("uniform_noise", base=tuple(base), amplitude=float(amplitude))

    @classmethod
    def gaussian(cls, center, width, peak, noise=0.0, base=None):
        peak = tuple(peak)
        base = tuple(base) if base is not None else (0.0,) * len(peak)
        return cls("gaussian", base=base, amplitude=float(noise),
                   center=None if center is None else tuple(center),
                   width=float(width), peak=peak)

    @classmethod
    def explicit(cls, arrays):
        return cls("explicit", arrays=tuple(np.asarray(a, dtype=float) for a in arrays))


@dataclass(frozen=True)
class RunConfig:
    grid: Grid
    model: ModelSpec
    stepper: Stepper = Stepper.ETDRK4
    dt: float = 1e-3
    t_final: float = 1.0
    snapshot_every: int = 100
    ic: InitialCondition = field(default_factory=InitialCondition)
    clip: Optional[tuple] = None
    blowup_threshold: float = 1e6
    rng_seed: int = 0
    dealias: Optional[bool] = None
    record_midpoint: bool = False

    def __post_init__(self):
        object.__setattr__(self, "stepper", Stepper(self.stepper))
        if self.clip is not None:
            object.__setattr__(self, "clip", tuple(float(c) for c in self.clip))

    @property
    def n_steps(self):
        return int(round(self.t_final / self.dt))

    @property
    def use_dealias(self):
        # on by default for ETDRK4, off for the plain split-step scheme
        if self.dealias is None:
            return self.stepper is Stepper.ETDRK4
        return bool(self.dealias)


def _is_pow2(n):
    return n > 0 and (n & (n - 1)) == 0


def validate(spec: ModelSpec, grid: Grid, cfg: Optional[RunConfig] = None) -> list:
    """Return a list of human-readable invariant violations (empty when runnable)."""
    out = []
    fam = spec.family
    if grid.dim not in (1, 2):
        out.append(f"grid dim: must be 1 or 2, got {grid.dim}")
    if grid.n < 8:
        out.append(f"grid n: need at least 8 points, got {grid.n}")
    if not grid.L > 0:
        out.append("grid L: domain length must be positive")

    want = {Family.KS_LOGISTIC: 1, Family.TWO_SPECIES: 2, Family.FLUID1D: 1, Family.FLUID2D: 1}[fam]
    if spec.n_species != want:
        out.append(f"species count: {fam.value} needs {want}, got {spec.n_species}")
    for i, sp in enumerate(spec.species):
        if not sp.D > 0:
            out.append(f"species {i} D: diffusivity must be positive")
        k = sp.kinetics
        if k.variant not in ("none", "logistic", "allee"):
            out.append(f"species {i} kinetics: unknown variant {k.variant!r}")
        elif k.active:
            if not (k.r > 0 and k.K > 0):
                out.append(f"species {i} kinetics: r and K must be positive")
            if k.variant == "allee" and not (k.A is not None and 0 < k.A < k.K):
                out.append(f"species {i} kinetics: Allee threshold needs 0 < A < K")

    sig = spec.signal
    if len(sig.alpha) != spec.n_species:
        out.append(f"signal alpha: expected {spec.n_species} production rates, got {len(sig.alpha)}")
    if any(a < 0 for a in sig.alpha) or not any(a > 0 for a in sig.alpha):
        out.append("signal alpha: rates must be >= 0 with at least one positive")
    if sig.beta < 0:
        out.append("signal beta: decay must be >= 0")
    if not sig.D_v > 0:
        out.append("signal D_v: diffusivity must be positive")

    if fam in (Family.FLUID1D, Family.FLUID2D):
        if spec.fluid is None:
            out.append(f"fluid params: {fam.value} requires fluid parameters")
        else:
            if not spec.fluid.nu > 0:
                out.append("fluid nu: viscosity must be positive")
            if spec.fluid.kappa < 0:
                out.append("fluid kappa: coupling must be >= 0")
    if fam is Family.FLUID1D and grid.dim != 1:
        out.append("grid dim: fluid1d runs on a 1D grid")
    if fam is Family.FLUID2D:
        if grid.dim != 2:
            out.append("grid dim: fluid2d runs on a 2D grid")
        if not grid.periodic:
            out.append("boundary: fluid2d vorticity form requires a periodic grid")

    if cfg is not None:
        if cfg.stepper.spectral:
            if not _is_pow2(grid.n):
                out.append(f"power-of-two grid: {cfg.stepper.value} needs n = 2^m, got {grid.n}")
            if not grid.periodic:
                out.append(f"boundary: {cfg.stepper.value} requires a periodic grid")
        if not cfg.dt > 0:
            out.append("dt: time step must be positive")
        elif not cfg.t_final >= cfg.dt:
            out.append("t_final: must be at least one time step")
        if cfg.snapshot_every < 1:
            out.append("snapshot_every: must be >= 1")
        if cfg.clip is not None and not (len(cfg.clip) == 2 and cfg.clip[0] < cfg.clip[1]):
            out.append("clip: expected (lo, hi) with lo < hi")
        if not cfg.blowup_threshold > 0:
            out.append("blowup_threshold: must be positive")
        out.extend(_validate_ic(cfg.ic, spec, grid))
    return out


def _validate_ic(ic, spec, grid):
    nf = len(field_names(spec))
    out = []
    if ic.variant in ("uniform_noise", "gaussian") and not ic.base:
        try:
            homogeneous_steady_state(spec)
        except MissingKinetics:
            out.append("ic base: no base values and no homogeneous steady state to fall back on")
    if ic.variant == "uniform_noise":
        if ic.base and len(ic.base) != nf:
            out.append(f"ic base: expected {nf} values, got {len(ic.base)}")
    elif ic.variant == "gaussian":
        if len(ic.peak) != nf or (ic.base and len(ic.base) != nf):
            out.append(f"ic peak/base: expected {nf} values each")
        if not ic.width > 0:
            out.append("ic width: must be positive")
    elif ic.variant == "explicit":
        if ic.arrays is None or len(ic.arrays) != nf:
            out.append(f"ic arrays: expected {nf} fields")
        elif any(np.shape(a) != grid.shape for a in ic.arrays):
            out.append(f"ic arrays: every field must have shape {grid.shape}")
    else:
        out.append(f"ic variant: unknown {ic.variant!r}")
    if ic.amplitude < 0:
        out.append("ic amplitude: noise amplitude must be >= 0")
    return out


def homogeneous_steady_state(spec: ModelSpec, base: Optional[Sequence[float]] = None) -> tuple:
    """Spatially uniform equilibrium.

    Single-species families return ``(u*, v*)`` with ``u* = K`` (or the supplied
    base density) and ``v* = alpha u*/beta``; fluid families append ``w* = 0``.
    Two species need ``base = (u1*, u2*)`` and return ``(u1*, u2*, v*)``.
    """
    sig = spec.signal
    if spec.family is Family.TWO_SPECIES:
        if base is None:
            raise MissingKinetics("two-species steady state needs base densities (u1*, u2*)")
        us = tuple(float(b) for b in base)
        v = sum(a * u for a, u in zip(sig.alpha, us)) / sig.beta
        return us + (v,)
    k = spec.species[0].kinetics
    if base is not None:
        u = float(np.atleast_1d(base)[0])
    elif k.active:
        u = k.K
    else:
        raise MissingKinetics("no logistic term and no base density supplied")
    out = (u, sig.alpha[0] * u / sig.beta)
    if spec.family in (Family.FLUID1D, Family.FLUID2D):
        out += (0.0,)
    return out


def initial_state(cfg: RunConfig) -> np.ndarray:
    """Materialize ``cfg.ic`` as an array of shape ``(n_fields, *grid.shape)``."""
    grid, ic, spec = cfg.grid, cfg.ic, cfg.model
    names = field_names(spec)
    nf = len(names)
    n_dens = spec.n_species + 1  # species + signal are non-negative
    rng = np.random.default_rng(cfg.rng_seed)
    y = np.empty((nf,) + grid.shape)
    if ic.variant == "explicit":
        for i, a in enumerate(ic.arrays):
            y[i] = a
        return y
    # an empty base means "start from the homogeneous steady state"
    base = ic.base if ic.base else homogeneous_steady_state(spec)
    if ic.variant == "uniform_noise":
        for i in range(nf):
            y[i] = base[i]
            if ic.amplitude > 0:
                y[i] += rng.uniform(-ic.amplitude, ic.amplitude, grid.shape)
    elif ic.variant == "gaussian":
        xs = grid.coords()
        c = ic.center if ic.center is not None else (grid.L / 2,) * grid.dim
        r2 = sum((x - ci) ** 2 for x, ci in zip(xs, c))
        bump = np.exp(-r2 / (2 * ic.width ** 2))
        for i in range(nf):
            y[i] = base[i] + ic.peak[i] * bump
            if ic.amplitude > 0 and i < spec.n_species:
                y[i] += rng.uniform(-ic.amplitude, ic.amplitude, grid.shape)
    np.maximum(y[:n_dens], 0.0, out=y[:n_dens])
    return y
