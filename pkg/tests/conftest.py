import numpy as np
import pytest

from chemotax.core import (FluidParams, Grid, Kinetics, ModelSpec, SignalKinetics,
                           SpeciesParams)


def ks_spec(D=0.1, chi=1.5, r=0.5, K=1.0, alpha=1.0, beta=0.5, D_v=0.1):
    kin = Kinetics.logistic(r, K) if r > 0 else Kinetics()
    return ModelSpec("ks_logistic", (SpeciesParams(D, chi, kin),),
                     SignalKinetics((alpha,), beta, D_v))


def two_spec(D1=1e-3, D2=1e-3, chi1=0.05, chi2=-0.05, a1=1.0, a2=1e-3, beta=1e-3, D_v=1e-2):
    return ModelSpec("two_species", (SpeciesParams(D1, chi1), SpeciesParams(D2, chi2)),
                     SignalKinetics((a1, a2), beta, D_v))


def fluid1d_spec(chi=1.0, nu=1.0, kappa=0.1, r=1.0):
    return ModelSpec("fluid1d", (SpeciesParams(1.0, chi, Kinetics.logistic(r, 1.0)),),
                     SignalKinetics((1.0,), 1.0, 1.0), FluidParams(nu, kappa))


def fluid2d_spec(chi=1.0, kappa=1.0, nu=0.1):
    return ModelSpec("fluid2d", (SpeciesParams(0.1, chi, Kinetics.logistic(1.0, 1.0)),),
                     SignalKinetics((1.0,), 1.0, 0.1), FluidParams(nu, kappa))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def periodic1d():
    return Grid(1, 64, 2 * np.pi)
