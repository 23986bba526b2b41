import numpy as np
import pytest

from eitcavity.model import SystemParams

FIG2A = dict(coupling_a=10.0, coupling_b=1.0, decay_a=90.0, decay_b=9.0)
FIG2B = dict(coupling_a=1.0, coupling_b=10.0, decay_a=9.0, decay_b=90.0)


def log_uniform(rng, low, high):
    return float(np.exp(rng.uniform(np.log(low), np.log(high))))


def random_params(rng, thermal=True) -> SystemParams:
    """A random, well-damped parameter set spanning weak to strong coupling."""
    return SystemParams(
        detuning_cavity=rng.uniform(-50, 50),
        detuning_a=rng.uniform(-50, 50),
        detuning_b=rng.uniform(-50, 50),
        coupling_a=log_uniform(rng, 0.01, 100),
        coupling_b=log_uniform(rng, 0.01, 100),
        drive=log_uniform(rng, 0.1, 10),
        cavity_decay=log_uniform(rng, 0.1, 10),
        decay_a=log_uniform(rng, 0.01, 100),
        decay_b=log_uniform(rng, 0.01, 100),
        thermal_c=log_uniform(rng, 1e-3, 10) if thermal else 0.0,
        thermal_a=log_uniform(rng, 1e-3, 10) if thermal else 0.0,
        thermal_b=log_uniform(rng, 1e-3, 10) if thermal else 0.0,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def fig2a():
    return SystemParams(**FIG2A)


@pytest.fixture
def fig2b():
    return SystemParams(**FIG2B)
