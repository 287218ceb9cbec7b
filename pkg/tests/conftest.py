import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from robustkit.states import canonical_ket, ket_to_density, maximally_mixed, schmidt  # noqa: E402

SQRT_HALF = 1 / np.sqrt(2)


@pytest.fixture
def bell():
    return canonical_ket([SQRT_HALF, SQRT_HALF])


@pytest.fixture
def bell_rho(bell):
    return ket_to_density(bell)


@pytest.fixture
def bell_schmidt(bell):
    return schmidt(bell)


@pytest.fixture
def product():
    return canonical_ket([1.0, 0.0])


@pytest.fixture
def skewed():
    return canonical_ket([np.sqrt(0.8), np.sqrt(0.2)])


@pytest.fixture
def qutrit_uniform():
    return canonical_ket([1 / np.sqrt(3)] * 3)


@pytest.fixture
def mixed2():
    return maximally_mixed(2)
