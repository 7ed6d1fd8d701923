"""Well-mixed kinetics: reaction terms, Jacobians, RK4 and Lyapunov spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import Kinetics, ModelSpec, SignalKinetics
from .errors import EmptyWindow, NonFinite


@dataclass(frozen=True)
class KineticState:
    u: float
    v: float


@dataclass
class LyapunovResult:
    exponents: tuple
    t_final: float
    history: np.ndarray = field(repr=False)  # rows (t, le1, le2)
    d_ky: float = 0.0

    def history_rows(self):
        """Rows ``(t, le1, le2, d_ky)`` for CSV export."""
        dky = [kaplan_yorke(sorted(r[1:], reverse=True)) for r in self.history]
        return np.column_stack([self.history, dky])


def reaction_u(u, k: Kinetics):
    if k.variant == "logistic":
        return k.r * u * (1 - u / k.K)
    if k.variant == "allee":
        return k.r * u * (1 - u / k.K) * (u / k.A - 1)
    return 0.0 * u


def reaction_u_prime(u, k: Kinetics):
    """d f/d u."""
    if k.variant == "logistic":
        return k.r * (1 - 2 * u / k.K)
    if k.variant == "allee":
        r, K, A = k.r, k.K, k.A
        # f = r (u - u^2/K)(u/A - 1)
        return r * ((1 - 2 * u / K) * (u / A - 1) + (u - u * u / K) / A)
    return 0.0 * u


def reaction_v(u, v, s: SignalKinetics):
    """``sum_i alpha_i u_i - beta v``; ``u`` may be a scalar or a sequence of species."""
    us = u if isinstance(u, (tuple, list)) else (u,)
    prod = sum(a * ui for a, ui in zip(s.alpha, us))
    return prod - s.beta * v


def kinetic_jacobian(state: KineticState, spec: ModelSpec) -> np.ndarray:
    k = spec.species[0].kinetics
    s = spec.signal
    return np.array([[reaction_u_prime(state.u, k), 0.0],
                     [s.alpha[0], -s.beta]])


def _rhs(u, v, k, alpha, beta):
    return reaction_u(u, k), alpha * u - beta * v


def rk4_step(state: KineticState, dt, spec: ModelSpec) -> KineticState:
    k = spec.species[0].kinetics
    a, b = spec.signal.alpha[0], spec.signal.beta
    u, v = state.u, state.v
    k1u, k1v = _rhs(u, v, k, a, b)
    k2u, k2v = _rhs(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v, k, a, b)
    k3u, k3v = _rhs(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v, k, a, b)
    k4u, k4v = _rhs(u + dt * k3u, v + dt * k3v, k, a, b)
    u = u + dt / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
    v = v + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
    if not (math.isfinite(u) and math.isfinite(v)):
        raise NonFinite(f"kinetic state became non-finite (u={u}, v={v})")
    return KineticState(u, v)


def integrate(state: KineticState, t_final, dt, spec: ModelSpec) -> KineticState:
    for _ in range(int(round(t_final / dt))):
        state = rk4_step(state, dt, spec)
    return state


def lyapunov_spectrum(spec: ModelSpec, ic: KineticState, t_final, dt=0.01,
                      renorm_every=10) -> LyapunovResult:
    """Finite-time Lyapunov exponents of the well-mixed kinetics.

    The state and a 2x2 tangent matrix are advanced together with RK4 under
    ``dPhi/dt = J(state) Phi``; every ``renorm_every`` steps the tangent matrix
    is QR-factorized and ``log|R_ii|`` accumulated.
    """
    n_steps = int(round(t_final / dt))
    if n_steps < 1:
        raise EmptyWindow("zero integration time: exponents are undefined")
    k = spec.species[0].kinetics
    alpha, beta = spec.signal.alpha[0], spec.signal.beta
    f = lambda u: reaction_u(u, k)  # noqa: E731
    fp = lambda u: reaction_u_prime(u, k)  # noqa: E731

    def deriv(u, v, p):
        # p = (p11, p12, p21, p22); J = [[f'(u), 0], [alpha, -beta]]
        ju = fp(u)
        return (f(u), alpha * u - beta * v,
                (ju * p[0], ju * p[1],
                 alpha * p[0] - beta * p[2], alpha * p[1] - beta * p[3]))

    u, v = float(ic.u), float(ic.v)
    p = (1.0, 0.0, 0.0, 1.0)
    sums = np.zeros(2)
    hist = []
    h = dt
    for step in range(1, n_steps + 1):
        du1, dv1, dp1 = deriv(u, v, p)
        du2, dv2, dp2 = deriv(u + 0.5 * h * du1, v + 0.5 * h * dv1,
                              tuple(pi + 0.5 * h * di for pi, di in zip(p, dp1)))
        du3, dv3, dp3 = deriv(u + 0.5 * h * du2, v + 0.5 * h * dv2,
                              tuple(pi + 0.5 * h * di for pi, di in zip(p, dp2)))
        du4, dv4, dp4 = deriv(u + h * du3, v + h * dv3,
                              tuple(pi + h * di for pi, di in zip(p, dp3)))
        u += h / 6 * (du1 + 2 * du2 + 2 * du3 + du4)
        v += h / 6 * (dv1 + 2 * dv2 + 2 * dv3 + dv4)
        p = tuple(pi + h / 6 * (a + 2 * b + 2 * c + d)
                  for pi, a, b, c, d in zip(p, dp1, dp2, dp3, dp4))
        if step % renorm_every == 0 or step == n_steps:
            Q, R = np.linalg.qr(np.array([[p[0], p[1]], [p[2], p[3]]]))
            diag = np.abs(np.diag(R))
            if not np.all(np.isfinite(diag)) or np.any(diag == 0):
                raise NonFinite("tangent dynamics degenerated")
            sums += np.log(diag)
            p = (Q[0, 0], Q[0, 1], Q[1, 0], Q[1, 1])
            t = step * h
            hist.append((t, *(sums / t)))
        if not (math.isfinite(u) and math.isfinite(v)):
            raise NonFinite(f"kinetic state became non-finite at step {step}")
    t = n_steps * h
    exps = tuple(sorted((sums / t).tolist(), reverse=True))
    return LyapunovResult(exps, t, np.array(hist), kaplan_yorke(exps))


def kaplan_yorke(exponents) -> float:
    """Kaplan-Yorke dimension of a descending exponent list."""
    lam = list(exponents)
    s = 0.0
    j = 0
    for i, l in enumerate(lam):
        if s + l >= 0:
            s += l
            j = i + 1
        else:
            break
    if j == 0:
        return 0.0
    if j == len(lam):
        return float(j)
    return j + s / abs(lam[j])
