"""Linear stability of homogeneous states: dispersion relations and thresholds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from .core import Family, ModelSpec, homogeneous_steady_state
from .errors import NonPositiveChi, NotWellMixedStable
from .kinetics import reaction_u_prime


@dataclass(frozen=True)
class DispersionMatrix:
    k: float
    entries: np.ndarray


@dataclass
class DispersionScan:
    ks: np.ndarray
    re_lambda: np.ndarray
    im_lambda: np.ndarray
    unstable_band: Optional[tuple] = None
    k_max: Optional[float] = None
    k_c: Optional[float] = None

    def rows(self):
        return np.column_stack([self.ks, self.re_lambda, self.im_lambda])


@dataclass(frozen=True)
class Threshold:
    chi_crit: float
    k_c: float
    chi_numeric: float
    k_c_numeric: float

    @property
    def rel_mismatch(self):
        return abs(self.chi_numeric - self.chi_crit) / abs(self.chi_crit)


@dataclass(frozen=True)
class HopfReport:
    threshold_chi: float
    discriminant: float
    oscillatory: bool


@dataclass(frozen=True)
class _Lin:
    """Single-species linearization data at the homogeneous state."""

    D: float
    D_v: float
    chi: float
    u_star: float
    f_u: float
    f_v: float
    g_u: float
    g_v: float

    @property
    def det0(self):
        return self.f_u * self.g_v - self.f_v * self.g_u

    def coeffs(self, chi=None):
        """``Delta(X) = a X^2 - b X + c`` with ``X = k^2``."""
        chi = self.chi if chi is None else chi
        a = self.D * self.D_v
        b = (self.D * self.g_v + self.D_v * self.f_u) + chi * self.u_star * self.g_u
        return a, b, self.det0


def linearization(spec: ModelSpec, jac=None, u_star=None) -> _Lin:
    """Collect ``D, D_v, chi, u*`` and the kinetic partials ``(f_u, f_v, g_u, g_v)``.

    ``jac`` overrides the partials (for reaction terms other than logistic);
    ``u_star`` overrides the base density.
    """
    sp = spec.species[0]
    if u_star is None:
        u_star = homogeneous_steady_state(spec)[0]
    if jac is None:
        jac = (float(reaction_u_prime(u_star, sp.kinetics)), 0.0,
               spec.signal.alpha[0], -spec.signal.beta)
    f_u, f_v, g_u, g_v = (float(j) for j in jac)
    return _Lin(sp.D, spec.signal.D_v, sp.chi, float(u_star), f_u, f_v, g_u, g_v)


def dispersion_matrix_single(spec: ModelSpec, k, jac=None, u_star=None) -> DispersionMatrix:
    p = linearization(spec, jac, u_star)
    k2 = k * k
    m = np.array([[-p.D * k2 + p.f_u, p.chi * p.u_star * k2 + p.f_v],
                  [p.g_u, -p.D_v * k2 + p.g_v]])
    return DispersionMatrix(k, m)


def dispersion_matrix_two_species(spec: ModelSpec, base, k) -> DispersionMatrix:
    s1, s2 = spec.species
    sig = spec.signal
    u1, u2 = base[0], base[1]
    k2 = k * k
    m = np.array([[-s1.D * k2, 0.0, s1.chi * u1 * k2],
                  [0.0, -s2.D * k2, s2.chi * u2 * k2],
                  [sig.alpha[0], sig.alpha[1], -sig.D_v * k2 - sig.beta]])
    return DispersionMatrix(k, m)


def trace_det(m) -> tuple:
    a = m.entries if isinstance(m, DispersionMatrix) else np.asarray(m)
    return a[0, 0] + a[1, 1], a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]


def growth_rate(m) -> tuple:
    """``(re, im)`` of the eigenvalue with the largest real part (``im >= 0`` for pairs)."""
    a = m.entries if isinstance(m, DispersionMatrix) else np.asarray(m, dtype=float)
    if a.shape == (2, 2):
        tau, det = trace_det(a)
        disc = 0.25 * tau * tau - det
        if disc >= 0:
            return 0.5 * tau + math.sqrt(disc), 0.0
        return 0.5 * tau, math.sqrt(-disc)
    lam = np.linalg.eigvals(a)
    i = np.argmax(lam.real)
    return float(lam[i].real), float(abs(lam[i].imag))


def turing_threshold(spec: ModelSpec, jac=None, u_star=None) -> Threshold:
    """Chemotactic sensitivity at which ``Delta(k^2)`` first acquires a double root.

    Returns the closed form together with an independent numerical search
    (bisection in chi on the minimum of ``Delta`` over ``X = k^2``).
    """
    p = linearization(spec, jac, u_star)
    if not (p.f_u + p.g_v < 0 and p.det0 > 0):
        raise NotWellMixedStable(
            f"well-mixed state unstable: trace={p.f_u + p.g_v}, det={p.det0}")
    a = p.D * p.D_v
    chi_c = (2 * math.sqrt(a * p.det0) - (p.D * p.g_v + p.D_v * p.f_u)) / (p.u_star * p.g_u)
    kc = (p.det0 / a) ** 0.25
    chi_n, kc_n = _numeric_threshold(p)
    return Threshold(chi_c, kc, chi_n, kc_n)


def _numeric_threshold(p: _Lin):
    x_hi = 16.0 * math.sqrt(p.det0 / (p.D * p.D_v)) + 1.0

    def dmin(chi):
        a, b, c = p.coeffs(chi)
        res = optimize.minimize_scalar(lambda x: a * x * x - b * x + c, bounds=(0.0, x_hi),
                                       method="bounded", options={"xatol": 1e-13 * x_hi})
        return res.fun, res.x

    scale = abs(p.D * p.g_v + p.D_v * p.f_u) + math.sqrt(p.D * p.D_v * p.det0)
    hi = scale / abs(p.u_star * p.g_u)
    while dmin(hi)[0] > 0:
        hi *= 2
    chi = optimize.brentq(lambda c: dmin(c)[0], 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
    return chi, math.sqrt(dmin(chi)[1])


def unstable_band(spec: ModelSpec, chi=None, jac=None, u_star=None) -> Optional[tuple]:
    """Interval ``(k1, k2)`` where ``Delta(k) < 0``, or ``None`` if empty."""
    p = linearization(spec, jac, u_star)
    a, b, c = p.coeffs(chi)
    disc = b * b - 4 * a * c
    if disc < 0:
        if disc > -1e-12 * b * b and b > 0:
            x = b / (2 * a)
            return math.sqrt(x), math.sqrt(x)
        return None
    sq = math.sqrt(disc)
    x1, x2 = (b - sq) / (2 * a), (b + sq) / (2 * a)
    if x1 <= 0 or x2 <= 0:
        return None
    return math.sqrt(x1), math.sqrt(x2)


def hopf_criterion_kinetic(spec: ModelSpec, k, chi=None, jac=None, u_star=None) -> HopfReport:
    """Threshold ``chi_H(k) = (D k^2 - f_u)(D_v k^2 - g_v)/(u* g_u)`` and oscillation flag.

    The flag is set when the eigenvalue pair at ``k`` is complex with
    non-negative real part at the supplied (or spec) sensitivity.
    """
    p = linearization(spec, jac, u_star)
    chi = p.chi if chi is None else chi
    k2 = k * k
    thr = (p.D * k2 - p.f_u) * (p.D_v * k2 - p.g_v) / (p.u_star * p.g_u)
    m = dispersion_matrix_single(spec.with_chi(chi), k, jac=(p.f_u, p.f_v, p.g_u, p.g_v),
                                 u_star=p.u_star)
    tau, det = trace_det(m)
    disc = tau * tau - 4 * det
    return HopfReport(thr, disc, bool(disc < 0 and tau >= 0))


def simplified_dispersion(k, chi, D, alpha, beta):
    """Real part of ``-D k^2 + sqrt((chi k^2)^2 - alpha beta)``."""
    k = np.asarray(k, dtype=float)
    root = np.sqrt(((chi * k * k) ** 2 - alpha * beta).astype(complex))
    out = (-D * k * k + root).real
    return float(out) if out.ndim == 0 else out


def fluid_stability_condition(spec: ModelSpec, L) -> bool:
    sp = spec.species[0]
    s = spec.signal
    return bool(sp.chi * s.alpha[0] / s.beta < sp.D * math.pi ** 2 / L ** 2)


def critical_mass(D, chi) -> float:
    if not chi > 0:
        raise NonPositiveChi(f"critical mass needs chi > 0, got {chi}")
    return 8 * math.pi * D / chi


def admissible_wavenumbers(L, n_modes):
    """Neumann modes ``k_n = n pi / L`` for ``n = 1..n_modes``."""
    return np.arange(1, n_modes + 1) * math.pi / L


def dispersion_scan(spec: ModelSpec, chi=None, ks=None, k_hi=None, grid=None,
                    base=None, n_samples=2048) -> DispersionScan:
    """Leading growth rate over a wavenumber grid.

    The default grid is ``[0, k_hi]`` with ``k_hi = 4 k_c`` when a Turing
    threshold exists, else ``pi/dx`` from ``grid``.
    """
    if chi is not None:
        spec = spec.with_chi(chi)
    two = spec.family is Family.TWO_SPECIES
    k_c = None
    if not two:
        try:
            k_c = turing_threshold(spec).k_c
        except NotWellMixedStable:
            k_c = None
    if ks is None:
        if k_hi is None:
            if k_c is not None:
                k_hi = 4 * k_c
            elif grid is not None:
                k_hi = math.pi / grid.dx
            else:
                k_hi = 10.0
        ks = np.linspace(0.0, k_hi, n_samples)
    ks = np.asarray(ks, dtype=float)
    if two:
        if base is None:
            raise ValueError("two-species scan needs base densities")
        mats = [dispersion_matrix_two_species(spec, base, k) for k in ks]
    else:
        mats = [dispersion_matrix_single(spec, k) for k in ks]
    rates = np.array([growth_rate(m) for m in mats])
    re, im = rates[:, 0], rates[:, 1]
    band, k_max = _band_from_samples(ks, re)
    return DispersionScan(ks, re, im, band, k_max, k_c)


def _band_from_samples(ks, re):
    pos = re > 0
    if not pos.any():
        return None, None
    i = int(np.argmax(re))
    lo = i
    while lo > 0 and pos[lo - 1]:
        lo -= 1
    hi = i
    while hi < len(ks) - 1 and pos[hi + 1]:
        hi += 1

    def cross(a, b):
        # zero of the linear interpolant between samples a and b
        return ks[a] + (ks[b] - ks[a]) * re[a] / (re[a] - re[b])

    k1 = cross(lo - 1, lo) if lo > 0 else ks[0]
    k2 = cross(hi, hi + 1) if hi < len(ks) - 1 else ks[-1]
    return (float(k1), float(k2)), float(ks[i])
