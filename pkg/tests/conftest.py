"""Общие фикстуры: конфигурации графа, нулевые и гладкие потенциалы, спектральные данные q ≡ 0."""

from pathlib import Path

import numpy as np
import pytest

from star_spectral.models.data import SpectralDataIP1, SpectralDataIP2
from star_spectral.models.graph import PotentialVector, StarGraphConfig
from star_spectral.ode.closed_forms import aux_phase

FIXTURES = Path(__file__).parent / "fixtures"
ZERO_M3_DIR = FIXTURES / "zero_m3"


def zero_lambdas(m: int, N: int) -> np.ndarray:
    """λ_nk при q ≡ 0: n² для k < m и (n − ½)² для k = m."""
    n = np.arange(1, N + 1, dtype=float)[:, None]
    return np.hstack([np.repeat(n**2, m - 1, axis=1), (n - 0.5) ** 2])


def zero_aux_lambdas(m: int, N: int) -> np.ndarray:
    phi = aux_phase(m)
    n = np.arange(1, N + 1, dtype=float)[:, None]
    return np.hstack([np.repeat(n**2, m - 2, axis=1), (n - 1 + phi) ** 2, (n - phi) ** 2])


def cosine_potentials(config: StarGraphConfig, amplitudes) -> PotentialVector:
    return PotentialVector.from_functions(
        [lambda x, a=a: a * np.cos(2 * x) for a in amplitudes],
        config.grid_points,
    )


@pytest.fixture
def config3() -> StarGraphConfig:
    return StarGraphConfig(edge_count=3, grid_points=256)


@pytest.fixture
def zero3(config3) -> PotentialVector:
    return PotentialVector.zero(config3)


@pytest.fixture
def smooth3(config3) -> PotentialVector:
    return cosine_potentials(config3, (0.1, -0.05, 0.02))


@pytest.fixture
def zero_ip1_m3() -> SpectralDataIP1:
    N, m = 12, 3
    return SpectralDataIP1(zero_lambdas(m, N), np.array([zero_aux_lambdas(m, N)] * (m - 1)))


@pytest.fixture
def zero_ip2_m3() -> SpectralDataIP2:
    N, m = 5, 3
    return SpectralDataIP2(zero_lambdas(m, N), np.full((N, m, m), 0.1))
