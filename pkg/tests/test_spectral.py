"""Тесты прямой задачи: собственные значения, вспомогательные спектры, весовые числа."""

import numpy as np
import pytest

from star_spectral.errors import IndexingError, InvalidInputError, OutOfRangeError, PoleProximityError
from star_spectral.models.data import SpectralDataIP2
from star_spectral.models.graph import Potential, PotentialVector, StarGraphConfig, random_in_ball
from star_spectral.models.spectrum import AuxSpectrum
from star_spectral.ode.closed_forms import aux_phase, zero_delta, zero_delta_aux
from star_spectral.ode.engine import StarSystem
from star_spectral.spectral.characteristic import AuxCharacteristic, MainCharacteristic
from star_spectral.spectral.forward import (
    asymptotic_report,
    cluster_contours,
    contour_residues,
    forward_ip2,
    locate_aux_spectra,
    locate_spectrum,
    weight_numbers,
    weight_sum_rule,
    weyl_values,
)
from star_spectral.spectral.roots import assign_indices, disk_roots


class TestZeroSpectrum:
    """Замкнутые значения для q ≡ 0."""

    @pytest.mark.parametrize("m", [2, 3, 5])
    def test_main_spectrum(self, m):
        """ρ_nk = n с кратностью m − 1 и ρ_nm = n − ½."""
        config = StarGraphConfig(m, 256)
        spectrum = locate_spectrum(PotentialVector.zero(config), 10, config)
        n = np.arange(1, 11, dtype=float)
        rhos = spectrum.rhos
        assert np.max(np.abs(rhos[:, -1] - (n - 0.5))) < 1e-10
        assert np.max(np.abs(rhos[:, :-1] - n[:, None])) < 1e-9
        if m > 2:
            assert spectrum.entry(3, 1).multiplicity == m - 1

    def test_aux_spectra(self, config3, zero3):
        """Ветви n − 1 + φ и n − φ, φ = arccos(1/√3)/π ≈ 0.304087."""
        phi = aux_phase(3)
        assert phi == pytest.approx(0.304087, abs=1e-6)
        spectra = locate_aux_spectra(zero3, 10, config3)
        assert len(spectra) == 2
        n = np.arange(1, 11, dtype=float)
        for spectrum in spectra:
            assert isinstance(spectrum, AuxSpectrum)
            rhos = spectrum.rhos
            assert np.max(np.abs(rhos[:, 0] - n)) < 1e-8
            assert np.max(np.abs(rhos[:, 1] - (n - 1 + phi))) < 1e-8
            assert np.max(np.abs(rhos[:, 2] - (n - phi))) < 1e-8

    def test_remainders_vanish(self, config3, zero3):
        """Остатки κ и ξ нулевого потенциала равны нулю."""
        spectrum = locate_spectrum(zero3, 6, config3)
        assert np.max(np.abs(spectrum.remainders)) < 1e-8
        assert not spectrum.has_negative


class TestSpectrumChecks:
    """Проверки входных данных и согласованности."""

    def test_nonzero_mean_rejected(self, config3):
        """Потенциал с ненулевым средним отклоняется."""
        v = PotentialVector.from_functions([lambda x: 1.0 + 0 * x] * 3, config3.grid_points)
        with pytest.raises(InvalidInputError):
            locate_spectrum(v, 3, config3)

    def test_too_many_modes(self, config3, zero3):
        """N выше допустимого для сетки — ошибка диапазона."""
        with pytest.raises(OutOfRangeError):
            locate_spectrum(zero3, config3.max_modes + 1, config3)

    def test_sorted_within_branches(self, config3, smooth3):
        """Собственные значения возрастают по n в каждой ветви."""
        spectrum = locate_spectrum(smooth3, 12, config3)
        assert np.all(np.diff(spectrum.lambdas, axis=0) > 0)

    def test_zeros_are_zeros(self, config3, smooth3):
        """Δ обращается в нуль в найденных точках."""
        spectrum = locate_spectrum(smooth3, 8, config3)
        system = StarSystem(smooth3, config3)
        rho = spectrum.rhos.ravel()
        values = MainCharacteristic(system).scaled(rho)
        assert np.max(np.abs(values)) < 1e-8

    def test_edge_swap_symmetry(self, config3):
        """Перестановка рёбер 1 и 2: тот же основной спектр, Λ₁ и Λ₂ меняются местами."""
        v = random_in_ball(config3, 1.0, seed=2)
        swapped = PotentialVector((v[1], v[0], v[2]))
        spectrum = locate_spectrum(v, 6, config3)
        np.testing.assert_allclose(locate_spectrum(swapped, 6, config3).lambdas, spectrum.lambdas, atol=1e-10)
        aux = locate_aux_spectra(v, 6, config3)
        aux_swapped = locate_aux_spectra(swapped, 6, config3)
        np.testing.assert_allclose(aux_swapped[0].lambdas, aux[1].lambdas, atol=1e-10)
        np.testing.assert_allclose(aux_swapped[1].lambdas, aux[0].lambdas, atol=1e-10)
        weights = weight_numbers(v, spectrum, config3)
        weights_swapped = weight_numbers(swapped, spectrum, config3)
        np.testing.assert_allclose(weights_swapped.beta[:, :, [1, 0, 2]], weights.beta, rtol=1e-7, atol=1e-12)

    def test_splitting_of_double_eigenvalue(self, config3):
        """Малый потенциал на одном ребре расщепляет двукратное λ = 1 около асимптоты."""
        x = config3.nodes
        bump = Potential(0.05 * np.cos(2 * x))
        v = PotentialVector((bump, Potential.zero(config3.grid_points), Potential.zero(config3.grid_points)))
        spectrum = locate_spectrum(v, 4, config3)
        first = spectrum.lambdas[0]
        assert abs(first[0] - 1.0) < 0.05 and abs(first[1] - 1.0) < 0.05
        assert first[0] <= first[1]

    def test_assign_indices_mismatch(self):
        """Число нулей должно совпадать с числом ветвей."""
        with pytest.raises(IndexingError):
            assign_indices([1.0, 2.0], np.array([1.0, 1.0, 0.5]))

    def test_assign_indices_orders_groups(self):
        """Нули ставятся к ближайшим асимптотам, в группе по возрастанию."""
        ordered = assign_indices([0.26, 1.02, 0.98], np.array([1.0, 1.0, 0.5]))
        assert ordered == pytest.approx([0.98, 1.02, 0.26])

    def test_disk_roots_double_root(self):
        """Степенные суммы находят двукратный корень."""
        roots = disk_roots(lambda z: (z - 0.3) ** 2 * (z + 2.0), np.array([0.3]), np.array([0.5]))
        assert len(roots[0]) == 2
        assert all(abs(r - 0.3) < 1e-8 for r in roots[0])


class TestAuxCharacteristic:
    """Тесты вспомогательных характеристических функций."""

    def test_values_match_closed_form(self, config3, zero3):
        """Δ_j нулевого потенциала по формуле."""
        lam = np.array([0.4, 2.2])
        func = AuxCharacteristic(StarSystem(zero3, config3), 2)
        assert np.allclose(func.values(lam), zero_delta_aux(3, lam), atol=1e-12)
        assert "2" in func.label

    def test_invalid_vertex(self, config3, zero3):
        """Номер вершины вне 1..m отклоняется."""
        with pytest.raises(InvalidInputError):
            AuxCharacteristic(StarSystem(zero3, config3), 4)


class TestWeights:
    """Весовые числа и функция Вейля."""

    def test_zero_potential_closed_forms(self, config3, zero3):
        """β_{1,m,j} = 1/(6π), вычет кластера λ = 1 равен 4/(3π), делится поровну."""
        spectrum = locate_spectrum(zero3, 4, config3)
        weights = weight_numbers(zero3, spectrum, config3)
        assert np.max(np.abs(weights.beta[0, 2] - 1 / (6 * np.pi))) < 1e-8
        assert np.max(np.abs(weights.alpha[0, 0] - 4 / (3 * np.pi))) < 1e-8
        assert np.max(np.abs(weights.beta[0, 0] - 2 / (3 * np.pi))) < 1e-8
        assert weights.is_nonnegative
        assert any(split.method == "equal" for split in weights.splits)

    def test_sum_rule(self, config3, smooth3):
        """Σ_j α_j ‖S_j‖² = кратность кластера."""
        spectrum = locate_spectrum(smooth3, 6, config3)
        weights = weight_numbers(smooth3, spectrum, config3)
        sums = weight_sum_rule(smooth3, spectrum, weights, config3)
        multiplicities = np.array([len(c) for c in spectrum.clusters()])
        assert np.max(np.abs(sums - multiplicities)) < 1e-6

    def test_contours_exclude_neighbours(self, config3, smooth3):
        """Окружность вокруг кластера не достаёт до соседнего собственного значения."""
        spectrum = locate_spectrum(smooth3, 8, config3)
        _, centers, radii = cluster_contours(spectrum)
        for c, r in zip(centers, radii):
            others = np.abs(centers - c)
            assert r < 0.5 * others[others > 0].min()

    @pytest.mark.slow
    def test_close_pair_residues(self):
        """Пара с зазором ≪ 10⁻³: вычеты каждого полюса отдельно, правило сумм до 10⁻⁶."""
        config = StarGraphConfig(3, 512)
        v = random_in_ball(config, 1.0, seed=11)
        spectrum, weights = forward_ip2(v, 6, config)
        lambdas = spectrum.lambdas.ravel()
        order = np.argsort(lambdas)
        gaps = np.diff(lambdas[order])
        i = int(np.argmin(gaps))
        assert gaps[i] < 1e-3
        pair = lambdas[order[i : i + 2]]
        tight = contour_residues(StarSystem(v, config).characteristic, pair, np.full(2, 0.1 * gaps[i]))
        alpha = weights.alpha.reshape(-1, 3)[order[i : i + 2]]
        np.testing.assert_allclose(alpha, tight, rtol=1e-5, atol=1e-12)
        sums = weight_sum_rule(v, spectrum, weights, config)
        multiplicities = np.array([len(c) for c in spectrum.clusters()])
        assert np.max(np.abs(sums - multiplicities)) < 1e-6

    def test_reference_split_not_worse(self, config3, zero3):
        """Разбиение по эталону не хуже равного по вкладу в δ̃."""
        spectrum, weights = forward_ip2(zero3, 3, config3)
        reference_betas = weights.beta.copy()
        reference_betas[0, 0] *= 1.5
        reference_betas[0, 1] *= 0.5
        reference = SpectralDataIP2(spectrum.lambdas, reference_betas)
        _, split = forward_ip2(zero3, 3, config3, reference=reference)
        equal_cost = np.abs(weights.beta - reference_betas).sum()
        split_cost = np.abs(split.beta - reference_betas).sum()
        assert split_cost <= equal_cost + 1e-12

    def test_weyl_values(self, config3, zero3):
        """M_j = −Δ_j/Δ вне спектра."""
        lam = np.array([0.5, 2.0])
        sample = weyl_values(zero3, lam, config3)
        expected = -zero_delta_aux(3, lam) / zero_delta(3, lam)
        assert np.allclose(sample.values[0], expected.real, atol=1e-10)
        assert sample.values.shape == (3, 2)

    def test_weyl_pole_proximity(self, config3, zero3):
        """Точка на собственном значении — ошибка близости к полюсу."""
        with pytest.raises(PoleProximityError) as info:
            weyl_values(zero3, [0.25], config3)
        assert info.value.eigenvalue == pytest.approx(0.25)


@pytest.mark.slow
class TestRandomEnsemble:
    """Свойства на случайных потенциалах из P₁."""

    def test_weights_nonnegative(self):
        """Все β ≥ −10⁻¹⁰ на ансамбле."""
        config = StarGraphConfig(3, 256)
        for seed in range(5):
            v = random_in_ball(config, 1.0, seed=seed)
            _, weights = forward_ip2(v, 8, config)
            assert weights.is_nonnegative

    def test_remainder_tails(self):
        """Хвост l₂-суммы остатков от N/2 до N меньше 25% при N = 40."""
        config = StarGraphConfig(3, 512)
        v = random_in_ball(config, 1.0, seed=3)
        spectrum, weights = forward_ip2(v, 40, config)
        for report in asymptotic_report(spectrum) + asymptotic_report(weights):
            assert report.tail_share(20) < 0.25, report.name
        for aux in locate_aux_spectra(v, 40, config):
            (report,) = asymptotic_report(aux)
            assert report.name == f"xi_{aux.j}"
            assert report.tail_share(20) < 0.25
