"""Тесты моделей: потенциалы, шар P_Q, спектральные данные."""

import numpy as np
import pytest

from star_spectral.errors import InvalidInputError
from star_spectral.models.data import SpectralDataIP1, SpectralDataIP2
from star_spectral.models.graph import (
    Potential,
    PotentialVector,
    StarGraphConfig,
    ball_membership,
    normalize_mean_zero,
    random_in_ball,
)
from star_spectral.models.spectrum import BranchKind, assign_clusters, build_spectrum, main_branches

from tests.conftest import zero_lambdas


class TestStarGraphConfig:
    """Тесты конфигурации графа."""

    def test_rejects_single_edge(self):
        """m = 1 не поддерживается."""
        with pytest.raises(InvalidInputError):
            StarGraphConfig(edge_count=1)

    def test_effective_lambda_bound(self):
        """Предел λ ограничен сеткой: (M/10)²."""
        config = StarGraphConfig(3, 200, lambda_max=1e6)
        assert config.effective_lambda_max == pytest.approx(400.0)
        assert config.max_modes == 19

    def test_nodes(self):
        """Сетка содержит M + 1 узел от 0 до π."""
        config = StarGraphConfig(3, 64)
        assert config.nodes.size == 65
        assert config.nodes[-1] == pytest.approx(np.pi)


class TestPotential:
    """Тесты потенциала на ребре."""

    def test_rejects_nan(self):
        """Нечисловые значения отклоняются."""
        samples = np.zeros(33)
        samples[3] = np.nan
        with pytest.raises(InvalidInputError):
            Potential(samples)

    def test_mean_zero_projection(self):
        """Проекция на подпространство ∫q = 0 возвращает сдвиг."""
        p = Potential.from_function(lambda x: 1.0 + np.cos(x), 128)
        projected, shift = normalize_mean_zero(p)
        assert projected.is_mean_zero
        assert shift == pytest.approx(1.0, abs=1e-12)

    def test_cosine_norm(self):
        """‖a cos 2x‖ = |a|√(π/2)."""
        p = Potential.from_function(lambda x: 0.3 * np.cos(2 * x), 512)
        assert p.l2_norm == pytest.approx(0.3 * np.sqrt(np.pi / 2), rel=1e-5)

    def test_resample_preserves_smooth_function(self):
        """Перенос на другую сетку сплайном точен для гладких функций."""
        p = Potential.from_function(lambda x: np.cos(2 * x), 128)
        fine = p.resample(512)
        expected = np.cos(2 * fine.nodes)
        assert np.max(np.abs(fine.samples - expected)) < 1e-5


class TestPotentialVector:
    """Тесты вектора потенциалов и шара P_Q."""

    def test_norm_above_ball_rejected(self):
        """Вектор вне шара Q отклоняется при создании."""
        p = Potential.from_function(lambda x: np.cos(2 * x), 64)
        with pytest.raises(InvalidInputError):
            PotentialVector((p, p, p), ball_radius=0.1)

    def test_ball_membership(self, zero3):
        """Нулевой вектор лежит в любом шаре с запасом Q."""
        inside, margin = ball_membership(zero3, 0.5)
        assert inside
        assert margin == pytest.approx(0.5)

    def test_random_in_ball_deterministic(self, config3):
        """Одно зерно даёт один и тот же вектор."""
        a = random_in_ball(config3, 0.5, seed=7)
        b = random_in_ball(config3, 0.5, seed=7)
        c = random_in_ball(config3, 0.5, seed=8)
        assert a.distance(b) == 0.0
        assert a.distance(c) > 0.0

    def test_random_in_ball_properties(self, config3):
        """Случайный вектор лежит в шаре и имеет нулевые средние."""
        for seed in range(5):
            v = random_in_ball(config3, 0.5, seed=seed)
            assert v.total_norm <= 0.5 + 1e-9
            assert v.is_mean_zero

    def test_distance_is_sum_of_edge_norms(self, config3, zero3, smooth3):
        """Расстояние — сумма L₂-норм разностей по рёбрам."""
        assert smooth3.distance(zero3) == pytest.approx(smooth3.total_norm)
        assert smooth3.edge_distances(zero3) == pytest.approx(smooth3.norms)


class TestSpectrumModel:
    """Тесты нумерации и кластеров."""

    def test_clusters_group_equal_values(self):
        """Совпадающие значения попадают в один кластер."""
        labels = assign_clusters([1.0, 0.25, 1.0, 4.0])
        assert labels[0] == labels[2]
        assert len(set(labels)) == 3

    def test_zero_spectrum_remainders_vanish(self):
        """Для q ≡ 0 остатки κ_nk равны нулю."""
        spectrum = build_spectrum(3, 4, zero_lambdas(3, 4), main_branches(3))
        assert np.max(np.abs(spectrum.remainders)) < 1e-12
        assert spectrum.entry(1, 1).multiplicity == 2
        assert spectrum.entry(1, 3).multiplicity == 1

    def test_branch_offsets(self):
        """Сдвиги асимптот: 1, ½, φ, 1 − φ."""
        assert BranchKind.SINE.offset(3) == 1.0
        assert BranchKind.COSINE.offset(3) == 0.5
        assert BranchKind.AUX_LOW.offset(3) == pytest.approx(0.304087, abs=1e-6)
        assert BranchKind.AUX_HIGH.offset(3) == pytest.approx(1 - 0.304087, abs=1e-6)


class TestSpectralData:
    """Тесты спектральных данных."""

    def test_negative_weight_rejected(self):
        """Отрицательный вес β отклоняется."""
        betas = np.full((2, 3, 3), 0.1)
        betas[0, 0, 0] = -1e-3
        with pytest.raises(InvalidInputError):
            SpectralDataIP2(zero_lambdas(3, 2), betas)

    def test_unsorted_branch_rejected(self):
        """Значения ветви должны возрастать по n."""
        lambdas = zero_lambdas(3, 3)[::-1]
        with pytest.raises(InvalidInputError):
            SpectralDataIP2(lambdas, np.full((3, 3, 3), 0.1))

    def test_dict_round_trip(self, zero_ip2_m3):
        """to_dict/from_dict сохраняют данные и число известных вершин."""
        data = SpectralDataIP2(zero_ip2_m3.lambdas, zero_ip2_m3.betas, known_vertices=2)
        restored = SpectralDataIP2.from_dict(data.to_dict())
        assert np.array_equal(restored.lambdas, data.lambdas)
        assert restored.known_vertices == 2
        assert not restored.complete

    def test_ip1_shape_checked(self):
        """Вспомогательных спектров должно быть m − 1."""
        with pytest.raises(InvalidInputError):
            SpectralDataIP1(zero_lambdas(3, 2), np.zeros((3, 2, 3)))
