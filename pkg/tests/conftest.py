import numpy as np
import pytest

from utils.potential_model import SymplecticPotential, fubini_study, malla_momento

N_PRUEBA = 64


def bache(n=N_PRUEBA, amplitud=0.5):
    """g = a·x²(1-x)²; q ≥ 1 - a/4 en toda la malla."""
    x = malla_momento(n)
    return SymplecticPotential(amplitud * x**2 * (1 - x) ** 2)


@pytest.fixture
def fs():
    return fubini_study(N_PRUEBA)


@pytest.fixture
def suave():
    return bache()


@pytest.fixture
def rng():
    return np.random.default_rng(7)
