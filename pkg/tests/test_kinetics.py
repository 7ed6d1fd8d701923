import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chemotax.core import Kinetics
from chemotax.errors import EmptyWindow
from chemotax.kinetics import (KineticState, integrate, kaplan_yorke, kinetic_jacobian,
                               lyapunov_spectrum, reaction_u, reaction_u_prime, reaction_v,
                               rk4_step)

from conftest import ks_spec, two_spec


def test_reaction_terms():
    k = Kinetics.logistic(0.5, 1)
    assert reaction_u(1.0, k) == 0.0
    assert reaction_u(0.5, k) == pytest.approx(0.125)
    assert reaction_u(0.1, Kinetics.allee(1, 1, 0.2)) == pytest.approx(-0.045)
    assert reaction_u(0.3, Kinetics()) == 0.0


def test_allee_derivative_matches_finite_difference():
    k = Kinetics.allee(1.3, 2.0, 0.4)
    for u in (0.1, 0.7, 1.5):
        h = 1e-6
        fd = (reaction_u(u + h, k) - reaction_u(u - h, k)) / (2 * h)
        assert reaction_u_prime(u, k) == pytest.approx(fd, rel=1e-7)


def test_signal_production():
    s = ks_spec(alpha=1, beta=0.5).signal
    assert reaction_v(1.0, 2.0, s) == 0.0
    assert reaction_v(0.0, 1.0, ks_spec(alpha=1, beta=1).signal) == -1.0
    assert reaction_v((0.5, 0.5), 0.0, two_spec().signal) == pytest.approx(0.5005)


def test_jacobian_examples():
    spec = ks_spec(r=1, K=1, alpha=1, beta=1)
    J = kinetic_jacobian(KineticState(1.0, 1.0), spec)
    assert np.allclose(J, [[-1, 0], [1, -1]])
    assert np.allclose(np.linalg.eigvals(J), [-1, -1])
    assert kinetic_jacobian(KineticState(0.5, 0), spec)[0, 0] == 0.0
    assert kinetic_jacobian(KineticState(0.0, 0), spec)[0, 0] == 1.0


def test_rk4_fixed_point_and_decay():
    spec = ks_spec(r=0.5, K=1, alpha=1, beta=0.5)
    s = rk4_step(KineticState(1.0, 2.0), 0.1, spec)
    assert abs(s.u - 1) < 1e-14 and abs(s.v - 2) < 1e-14
    dec = ks_spec(r=0, alpha=1, beta=1)
    assert rk4_step(KineticState(0.0, 1.0), 0.1, dec).v == pytest.approx(0.9048375, abs=1e-7)


def test_logistic_integration_reaches_capacity():
    spec = ks_spec(r=1, K=1, alpha=1, beta=1)
    s = integrate(KineticState(0.01, 0.0), 20.0, 0.01, spec)
    exact = 1 / (1 + 99 * math.exp(-20))
    assert abs(s.u - exact) < 1e-8
    assert abs(s.u - 1) < 1e-6 + 99 * math.exp(-20)


def test_rk4_fourth_order_one_step():
    spec = ks_spec(r=0, alpha=1, beta=1)
    errs = []
    for dt in (0.2, 0.1):
        v = rk4_step(KineticState(0.0, 1.0), dt, spec).v
        errs.append(abs(v - math.exp(-dt)))
    # local error is O(dt^5); demand at least 2^4 * 0.9
    assert errs[0] / errs[1] >= 16 * 0.9


def test_lyapunov_reference_run():
    res = lyapunov_spectrum(ks_spec(r=1, K=1, alpha=1, beta=1), KineticState(0.5, 0.5), 1000.0)
    assert all(abs(x + 1) <= 0.05 for x in res.exponents)
    assert res.d_ky == 0.0
    rows = res.history_rows()
    assert rows.shape[1] == 4 and np.all(np.diff(rows[:, 0]) > 0)


def test_lyapunov_distinct_rates():
    res = lyapunov_spectrum(ks_spec(r=2, K=1, alpha=1, beta=3), KineticState(0.5, 0.5), 1000.0)
    assert res.exponents == pytest.approx((-2, -3), abs=0.02)


def test_lyapunov_zero_time():
    with pytest.raises(EmptyWindow):
        lyapunov_spectrum(ks_spec(), KineticState(0.5, 0.5), 0.0)


@settings(max_examples=6, deadline=None)
@given(r=st.floats(0.3, 3), beta=st.floats(0.3, 3), u0=st.floats(0.1, 1.9))
def test_lyapunov_converges_to_jacobian_rates(r, beta, u0):
    # equal rates form a Jordan block whose finite-time bias decays like log(T)/T
    T = 1000.0
    res = lyapunov_spectrum(ks_spec(r=r, K=1, alpha=1, beta=beta), KineticState(u0, 0.3), T,
                            dt=0.02)
    want = sorted((-r, -beta), reverse=True)
    for got, w in zip(res.exponents, want):
        assert abs(got - w) <= 5 / T + 0.02


def test_kaplan_yorke_examples():
    assert kaplan_yorke((-0.996511, -1.012356)) == 0
    assert kaplan_yorke((0.5, -1.0)) == pytest.approx(1.5)
    assert kaplan_yorke((0.0, -1.0)) == pytest.approx(1.0)


@given(a=st.floats(0.01, 5), b=st.floats(-5, -0.01), c=st.floats(0.1, 10))
def test_kaplan_yorke_scale_invariant(a, b, c):
    assert kaplan_yorke((a, b)) == pytest.approx(kaplan_yorke((c * a, c * b)), rel=1e-12)
