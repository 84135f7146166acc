import math

import numpy as np
import pytest

from qtherm.py import console, settings
from qtherm.py.ensemble import SignalEnsemble, dephasing_operation
from qtherm.py.qmat import bloch_ket, ket_to_density

HALF_PI = math.pi / 2.0
V2_ANGLES = (math.pi / 4.0, 0.0)  # cos(pi/8)|0> + sin(pi/8)|1>

# Bloch angles of v1 for the four comparison pairs; v2 is always V2_ANGLES.
PAIR_V1 = {
    "plus": (HALF_PI, 0.0),
    "plus_i": (HALF_PI, HALF_PI),
    "minus": (HALF_PI, math.pi),
    "zero": (0.0, 0.0),
}


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    saved = dict(settings._settings_cache)
    monkeypatch.delenv(settings.THREADS_ENV_VAR, raising=False)
    yield
    settings._settings_cache.clear()
    settings._settings_cache.update(saved)
    console.set_quiet(False)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def case_study():
    """{(0.3, |0>), (0.7, |+>)} under dephasing with r = 1/sqrt(2)."""
    plus = np.array([1.0, 1.0]) / math.sqrt(2.0)
    e = SignalEnsemble([0.3, 0.7], (ket_to_density([1.0, 0.0]), ket_to_density(plus)))
    return e, dephasing_operation(1.0 / math.sqrt(2.0))


@pytest.fixture
def pair_ensemble():
    """pair_ensemble(name, p) -> {(p, v1), (1 - p, v2)} for one of the PAIR_V1 pairs."""
    def build(name, p):
        v1 = ket_to_density(bloch_ket(*PAIR_V1[name]))
        v2 = ket_to_density(bloch_ket(*V2_ANGLES))
        return SignalEnsemble([p, 1.0 - p], (v1, v2))
    return build


@pytest.fixture
def full_dephasing():
    return dephasing_operation(0.0)
