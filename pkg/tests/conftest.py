import numpy as np
import pytest
from hypothesis import settings, strategies as st

from nematic2d.coeffs import FrankCoefficients, LeslieCoefficients
from nematic2d.initial import InitialDataSpec, generate_initial
from nematic2d.spectral import Grid

settings.register_profile("default", deadline=None, max_examples=30)
settings.load_profile("default")

# admissible set used throughout: lambda1 = -2, lambda2 = -0.5
LESLIE = LeslieCoefficients.from_mu(0.5, -0.75, 1.25, 2.0, 0.5, 1.0)
# the simple set from the coefficient examples: lambda1 = -2, lambda2 = 0
LESLIE_SIMPLE = LeslieCoefficients.from_mu(1.0, -1.0, 1.0, 2.0, 1.0, 1.0)
ONE = FrankCoefficients(1.0, 1.0, 1.0)
ANISO = FrankCoefficients(1.0, 1.05, 1.1)


def admissible_leslie(lambda1, lambda2, mu1_excess, mu4, beta):
    """Coefficient set satisfying every constraint by construction (Parodi fixes mu2 + mu3 = -lambda2)."""
    q = lambda2 ** 2 / lambda1
    s = -lambda2
    p = beta - q
    return LeslieCoefficients(
        mu1=q + mu1_excess, mu2=(s + lambda1) / 2, mu3=(s - lambda1) / 2, mu4=mu4,
        mu5=(p + lambda2) / 2, mu6=(p - lambda2) / 2, lambda1=lambda1, lambda2=lambda2)


def random_admissible(rng):
    return admissible_leslie(-rng.uniform(0.1, 5), rng.uniform(-5, 5), rng.uniform(1e-6, 3),
                             rng.uniform(0.1, 5), rng.uniform(1e-6, 3))


admissible = st.builds(
    admissible_leslie,
    st.floats(-5, -0.1), st.floats(-5, 5), st.floats(1e-6, 3), st.floats(0.1, 5), st.floats(1e-6, 3))


def random_state(n=32, seed=0, amplitude=0.5, tilt=0.5, cutoff=3):
    spec = InitialDataSpec(generator="random_smooth", amplitude=amplitude, tilt=tilt,
                           cutoff=cutoff, seed=seed)
    return generate_initial(spec, Grid(n))


def random_unit(rng, shape):
    v = rng.standard_normal((3,) + tuple(shape))
    return v / np.sqrt(np.sum(v ** 2, axis=0))


def random_traceless_sym(rng, shape):
    a, b = rng.standard_normal((2,) + tuple(shape))
    return np.array([[a, b], [b, -a]])


@pytest.fixture
def grid32():
    return Grid(32)


@pytest.fixture
def grid64():
    return Grid(64)


@pytest.fixture
def state32():
    return random_state(32, seed=3)
