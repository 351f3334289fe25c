import numpy as np
import pytest
from hypothesis import HealthCheck, assume, settings, strategies as st

from riskiness import DensityGamble, DiscreteGamble, ShiftedLognormal, Uniform

settings.register_profile(
    "default", max_examples=100, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def bernoulli():
    return DiscreteGamble([200.0, -100.0], [0.5, 0.5])


@pytest.fixture
def uniform_200():
    return DensityGamble(Uniform(-100.0, 200.0))


@pytest.fixture
def uniform_150():
    return DensityGamble(Uniform(-100.0, 150.0))


@pytest.fixture
def lognormal_10():
    return DensityGamble(ShiftedLognormal(1.0, 2.0, -10.0))


@st.composite
def discrete_gambles(draw, max_outcomes=6):
    """Finite gambles with positive mean and at least one loss."""
    n = draw(st.integers(2, max_outcomes))
    losses = draw(st.lists(st.floats(1.0, 500.0), min_size=1, max_size=n - 1))
    gains = draw(st.lists(st.floats(1.0, 2000.0), min_size=n - len(losses), max_size=n - len(losses)))
    weights = draw(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n))
    values = np.array([-x for x in losses] + gains)
    probs = np.array(weights) / np.sum(weights)
    assume(float(values @ probs) > 1e-3 * float(np.abs(values).max()))
    return DiscreteGamble(values, probs)


@st.composite
def uniform_gambles(draw):
    loss = draw(st.floats(1.0, 1000.0))
    ratio = draw(st.floats(1.05, 4.0))
    return DensityGamble(Uniform(-loss, ratio * loss))
