import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from noisykerr import NoiseComponent, NoiseModel, OscillatorModel

settings.register_profile(
    "default", deadline=None, max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def fig1_noise():
    """Three-bath benchmark model: classical 1/f + cold phonons + detector."""
    return NoiseModel(components=(
        NoiseComponent.classical_1f(1e-3),
        NoiseComponent.superohmic(1e-6, 3.0, 10.0),
        NoiseComponent.flat(1e-3, 10.0),
    ), omega_min=0.01, omega_max=50.0)


def flat_noise(w_s, w_a, omega_min=0.01, omega_max=50.0):
    """Frequency-independent (W_S, W_A) via a two-point tabulated component."""
    grid = np.array([omega_min, omega_max])
    comp = NoiseComponent.tabulated(grid, np.full(2, float(w_s)),
                                    np.full(2, float(w_a)))
    return NoiseModel(components=(comp,), omega_min=omega_min,
                      omega_max=omega_max)


@pytest.fixture
def fig1():
    return fig1_noise()


@pytest.fixture
def kerr53():
    return OscillatorModel(omega=5.0, chi=3.0)
