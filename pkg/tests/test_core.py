import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chemotax.core import (Grid, InitialCondition, Kinetics, RunConfig, homogeneous_steady_state,
                           initial_state, validate)
from chemotax.errors import MissingKinetics
from chemotax.kinetics import reaction_u, reaction_v

from conftest import fluid2d_spec, ks_spec, two_spec


def test_valid_ks_config_has_no_violations():
    spec = ks_spec()
    grid = Grid(2, 256, 5.0)
    assert validate(spec, grid, RunConfig(grid, spec, "etdrk4")) == []


def test_two_species_with_one_entry_flags_species_count():
    spec = two_spec()
    bad = type(spec)(spec.family, spec.species[:1], spec.signal)
    msgs = validate(bad, Grid(1, 64, 1.0))
    assert any("species count" in m for m in msgs)


def test_split_step_needs_power_of_two():
    spec = ks_spec()
    grid = Grid(2, 100, 2.0)
    msgs = validate(spec, grid, RunConfig(grid, spec, "ssfm"))
    assert any("power-of-two grid" in m for m in msgs)


def test_small_grid_and_neumann_spectral_rejected():
    spec = ks_spec()
    assert any("n:" in m for m in validate(spec, Grid(1, 4, 1.0)))
    grid = Grid(1, 64, 1.0, "neumann")
    assert any("periodic" in m for m in validate(spec, grid, RunConfig(grid, spec, "etdrk4")))


def test_fluid2d_requires_periodic_grid():
    grid = Grid(2, 32, 6.0, "neumann")
    assert any("periodic" in m for m in validate(fluid2d_spec(), grid))


def test_validate_is_pure():
    spec, grid = two_spec(), Grid(1, 7, 1.0)
    assert validate(spec, grid) == validate(spec, grid)


def test_grid_spacing_conventions():
    assert Grid(1, 100, 2.0).dx == pytest.approx(0.02)
    assert Grid(1, 101, 2.0, "neumann").dx == pytest.approx(0.02)
    g = Grid(1, 11, 1.0, "neumann")
    assert g.integrate(np.full(g.shape, 3.0)) == pytest.approx(3.0, rel=1e-14)
    g2 = Grid(2, 9, 2.0, "neumann")
    assert g2.integrate(np.ones(g2.shape)) == pytest.approx(4.0, rel=1e-14)


def test_steady_state_examples():
    assert homogeneous_steady_state(ks_spec(r=0.5, K=1, alpha=1, beta=0.5)) == (1.0, 2.0)
    assert homogeneous_steady_state(ks_spec(alpha=0.7, beta=0.7)) == pytest.approx((1.0, 1.0))
    v = homogeneous_steady_state(two_spec(), (0.5, 0.5))[2]
    assert v == pytest.approx(500.5, rel=1e-12)


def test_steady_state_needs_kinetics_or_base():
    with pytest.raises(MissingKinetics):
        homogeneous_steady_state(ks_spec(r=0))
    with pytest.raises(MissingKinetics):
        homogeneous_steady_state(two_spec())
    assert homogeneous_steady_state(ks_spec(r=0), base=[2.0])[0] == 2.0


@settings(max_examples=50, deadline=None)
@given(r=st.floats(0.01, 10), K=st.floats(0.1, 10), alpha=st.floats(0.01, 10),
       beta=st.floats(0.01, 10))
def test_steady_state_zeroes_kinetics(r, K, alpha, beta):
    spec = ks_spec(r=r, K=K, alpha=alpha, beta=beta)
    u, v = homogeneous_steady_state(spec)
    assert abs(reaction_u(u, spec.species[0].kinetics)) <= 1e-14 * r * K
    assert abs(reaction_v(u, v, spec.signal)) <= 1e-12 * max(alpha * u, beta * v)


def test_initial_state_seeded_and_clamped():
    spec = ks_spec()
    grid = Grid(1, 64, 1.0)
    ic = InitialCondition.uniform_noise((0.01, 2.0), 0.5)
    a = initial_state(RunConfig(grid, spec, ic=ic, rng_seed=3))
    b = initial_state(RunConfig(grid, spec, ic=ic, rng_seed=3))
    c = initial_state(RunConfig(grid, spec, ic=ic, rng_seed=4))
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    assert a.min() >= 0.0 and a.shape == (2, 64)
    assert np.all(np.abs(a[1] - 2.0) <= 0.5)


def test_gaussian_ic_peaks_at_centre():
    spec = ks_spec()
    grid = Grid(2, 32, 4.0)
    ic = InitialCondition.gaussian(None, 0.5, (3.0, 0.0), base=(1.0, 2.0))
    y = initial_state(RunConfig(grid, spec, ic=ic))
    assert np.unravel_index(np.argmax(y[0]), grid.shape) == (16, 16)
    assert y[0].max() == pytest.approx(4.0)
    assert np.all(y[1] == 2.0)


def test_kinetics_constructors():
    k = Kinetics.allee(1, 1, 0.2)
    assert k.active and k.A == 0.2
    assert not Kinetics().active
