import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chemotax import spectral
from chemotax.core import Grid
from chemotax.errors import UnsupportedBoundary


def _plan(n=64, L=2 * math.pi, dim=1):
    return spectral.build_plan(Grid(dim, n, L))


def test_wavenumber_layout_and_mask():
    p = _plan(8)
    assert np.allclose(p.kx, [0, 1, 2, 3, -4, -3, -2, -1])
    # half spectrum indices 0..4; index 3 and the Nyquist mode are masked
    assert list(p.dealias_mask) == [True, True, True, False, False]
    assert p.k2[0] == 0.0 and np.all(p.k2 >= 0)
    p2 = _plan(8, dim=2)
    assert p2.k2[0, 0] == 0.0 and p2.k2.shape == (8, 5)
    assert not p2.dealias_mask[3, 0] and p2.dealias_mask[-2, 2]


def test_neumann_rejected():
    with pytest.raises(UnsupportedBoundary):
        spectral.build_plan(Grid(1, 64, 1.0, "neumann"))


def test_grad_examples():
    p = _plan(64)
    x = p.grid.x
    assert np.max(np.abs(spectral.grad(p, np.sin(x))[0] - np.cos(x))) < 1e-12
    assert np.max(np.abs(spectral.grad(p, np.full(64, 3.0)))) < 1e-14
    p8 = _plan(8)
    # masked mode vanishes up to the rounding of the sampled sine
    g = spectral.grad(p8, np.sin(3 * p8.grid.x), dealias=True)
    assert np.max(np.abs(g)) < 1e-15


def test_grad_2d_axes():
    p = _plan(32, dim=2)
    X, Y = p.grid.coords()
    g = spectral.grad(p, np.sin(X) * np.cos(2 * Y))
    assert np.max(np.abs(g[0] - np.cos(X) * np.cos(2 * Y))) < 1e-12
    assert np.max(np.abs(g[1] + 2 * np.sin(X) * np.sin(2 * Y))) < 1e-12


def test_divergence_examples():
    p = _plan(64)
    x = p.grid.x
    d = spectral.divergence(p, spectral.grad(p, np.sin(x)))
    assert np.max(np.abs(d + np.sin(x))) < 1e-12
    assert np.max(np.abs(spectral.divergence(p, np.ones((1, 64))))) < 1e-14
    p8 = _plan(8)
    v = np.sin(3 * p8.grid.x)[None]
    assert np.max(np.abs(spectral.divergence(p8, v, dealias=True))) < 1e-15


def test_laplacian_eigenfunction():
    p = _plan(32, dim=2)
    X, Y = p.grid.coords()
    f = np.cos(2 * X + 3 * Y)
    assert np.max(np.abs(spectral.laplacian(p, f) + 13 * f)) < 1e-11


def test_propagator_examples():
    p = _plan(8)
    m = spectral.linear_propagator(p, 1.0, 0.0, 0.1)
    assert m[1] == pytest.approx(math.exp(-0.1), rel=1e-15)
    assert abs(m[1] - 0.9048374) < 1e-7
    assert m[0] == 1.0
    assert spectral.linear_propagator(p, 0.3, 0.5, 0.1)[0] == pytest.approx(math.exp(-0.05))
    assert np.all(spectral.linear_propagator(p, 0.0, 0.0, 0.1) == 1.0)


def test_etdrk4_coeff_examples():
    c = spectral.etdrk4_coeffs_for(np.array([0.0, -1.0, -50.0, -1e-9]), 1.0)
    assert c.phi1[0] == 1.0 and c.Q[0] == 0.5
    assert c.f1[0] == c.f2[0] == c.f3[0] == pytest.approx(1 / 6)
    assert c.phi1[1] == pytest.approx(1 - math.exp(-1), abs=1e-10)
    assert abs(c.phi1[1] - 0.6321206) < 1e-7
    # near-zero L stays finite and close to the limit
    assert c.phi1[3] == pytest.approx(1.0, abs=1e-8)
    assert np.all(np.isfinite(c.f1)) and np.all(np.isfinite(c.f3))
    assert np.max(np.abs(c.E2 ** 2 - c.E)) < 1e-13


def test_etdrk4_weights_match_closed_forms():
    # oracle: textbook expressions evaluated in extended precision where safe
    L, h = -2.0, 0.3
    z = L * h
    ez = math.exp(z)
    c = spectral.etdrk4_coeffs_for(np.array([L]), h)
    assert c.f1[0] == pytest.approx(h * (-4 - z + ez * (4 - 3 * z + z * z)) / z ** 3, rel=1e-10)
    assert c.f2[0] == pytest.approx(h * (2 + z + ez * (z - 2)) / z ** 3, rel=1e-10)
    assert c.f3[0] == pytest.approx(h * (-4 - 3 * z - z * z + ez * (4 - z)) / z ** 3, rel=1e-10)
    assert c.Q[0] == pytest.approx(h * (math.exp(z / 2) - 1) / z, rel=1e-12)


def test_poisson_examples():
    p = _plan(64)
    x = p.grid.x
    assert np.max(np.abs(spectral.poisson_solve_periodic(p, np.sin(x)) - np.sin(x))) < 1e-13
    assert np.max(np.abs(spectral.poisson_solve_periodic(p, np.full(64, 2.0)))) < 1e-15
    phi = spectral.poisson_solve_periodic(p, np.sin(2 * x))
    assert np.max(np.abs(phi - np.sin(2 * x) / 4)) < 1e-13


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 31), dim=st.sampled_from([1, 2]), logn=st.integers(3, 6))
def test_round_trip_and_parseval(seed, dim, logn):
    p = _plan(2 ** logn, L=3.0, dim=dim)
    f = np.random.default_rng(seed).normal(size=p.shape)
    fh = p.forward(f)
    assert np.max(np.abs(p.inverse(fh) - f)) < 1e-13
    assert spectral.spectral_energy(p, fh) == pytest.approx(np.sum(f * f), rel=1e-12)


def test_zero_mode_of_diffusion_is_mass_neutral():
    p = _plan(16, L=5.0, dim=2)
    assert spectral.linear_propagator(p, 3.7, 0.0, 0.7)[0, 0] == 1.0


def _etdrk4_step(c, u, nonlinear):
    # standard four-stage combination in spectral space
    Nu = nonlinear(u)
    a = c.E2 * u + c.Q * Nu
    Na = nonlinear(a)
    b = c.E2 * u + c.Q * Na
    Nb = nonlinear(b)
    cc = c.E2 * a + c.Q * (2 * Nb - Nu)
    Nc = nonlinear(cc)
    return c.E * u + c.f1 * Nu + 2 * c.f2 * (Na + Nb) + c.f3 * Nc


@settings(max_examples=10, deadline=None)
@given(D=st.floats(0.01, 2), decay=st.floats(0, 2), dt=st.floats(1e-3, 0.1))
def test_etdrk4_pure_linear_matches_propagator(D, decay, dt):
    p = _plan(32, L=4.0)
    c = spectral.etdrk4_coeffs(p, D, decay, dt)
    prop = spectral.linear_propagator(p, D, decay, dt)
    u0 = p.forward(np.random.default_rng(1).normal(size=32))
    u, ref = u0.copy(), u0.copy()
    for _ in range(100):
        u = _etdrk4_step(c, u, np.zeros_like)
        ref = prop * ref
    assert np.max(np.abs(u - ref)) <= 1e-12 * max(1.0, np.max(np.abs(u0)))


def test_etdrk4_constant_forcing_exact():
    # u' = L u + 1 has the closed form u(h) = e^{Lh} u0 + (e^{Lh} - 1)/L
    L, h = np.array([-3.0, 0.0]), 0.2
    c = spectral.etdrk4_coeffs_for(L, h)
    u = _etdrk4_step(c, np.array([1.0, 1.0]), lambda a: np.ones_like(a))
    assert u[0] == pytest.approx(math.exp(-0.6) + (math.exp(-0.6) - 1) / -3, rel=1e-12)
    assert u[1] == pytest.approx(1.2, rel=1e-14)
