"""Тесты целых функций по нулям, частичных характеристических функций и остатков Пэли–Винера."""

import numpy as np
import pytest

from star_spectral.entire.partial import partial_chars, recover_edge_m
from star_spectral.entire.products import (
    EntireFromZeros,
    delta_from_zeros,
    product_difference_terms,
    product_eval,
    shifted_product,
)
from star_spectral.entire.remainders import cauchy_coeffs, pw_extract
from star_spectral.errors import InvalidInputError, NearSingularError
from star_spectral.models.graph import StarGraphConfig, random_in_ball
from star_spectral.models.spectrum import BranchKind, aux_branches, build_spectrum, main_branches
from star_spectral.ode.closed_forms import aux_phase, zero_delta, zero_delta_aux
from star_spectral.ode.engine import EdgePropagator, StarSystem
from star_spectral.spectral.forward import locate_aux_spectra, locate_spectrum

from tests.conftest import cosine_potentials, zero_aux_lambdas, zero_lambdas


def relative_error(got, want) -> float:
    return float(np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want))))


class TestProducts:
    """Произведения по нулям."""

    def test_shifted_product_at_zero(self):
        """Π(1 − ρ²/(n + b)²) равно 1 при ρ = 0 и обращается в нуль при ρ = b."""
        assert shifted_product(0.0, 0.3)[()] == pytest.approx(1.0)
        assert abs(shifted_product(0.3, 0.3)[()]) < 1e-12

    def test_sine_branch_is_exact(self):
        """Нули n² дают sin ρπ/ρ и без хвоста, и с ним."""
        zeros = np.arange(1, 401, dtype=float) ** 2
        lam = np.array([0.3, 2.5])
        exact = np.sin(np.sqrt(lam) * np.pi) / np.sqrt(lam)
        assert np.allclose(product_eval(zeros, 400, lam), exact, atol=1e-12)
        assert np.allclose(product_eval(zeros, 400, lam, tail=False), exact, atol=1e-2)

    def test_asymptote_hit_is_finite(self):
        """Точка λ = a_n² не даёт деления на нуль."""
        product = EntireFromZeros(BranchKind.SINE, np.array([1.1, 4.2, 9.05]))
        value = product.evaluate(np.array([4.0]))
        assert np.all(np.isfinite(value))

    def test_too_few_zeros(self):
        """N больше числа заданных нулей — ошибка."""
        with pytest.raises(InvalidInputError):
            product_eval([1.0, 4.0], 3, 0.5)

    @pytest.mark.parametrize("m", [2, 3, 5])
    def test_zero_spectrum_delta(self, m):
        """Δ и Δ_j по нулям q ≡ 0 совпадают с замкнутыми формулами."""
        N = 8
        lam = np.array([-1.5, 0.4, 2.2, 30.7])
        main = build_spectrum(m, N, zero_lambdas(m, N), main_branches(m))
        aux = build_spectrum(m, N, zero_aux_lambdas(m, N), aux_branches(m), j=1)
        assert relative_error(delta_from_zeros(main, lam), zero_delta(m, lam)) < 1e-10
        assert relative_error(delta_from_zeros(aux, lam), zero_delta_aux(m, lam)) < 1e-10

    def test_reference_normalization(self):
        """Нормировка в точке λ* воспроизводит заданное значение."""
        main = build_spectrum(3, 4, zero_lambdas(3, 4), main_branches(3))
        value = delta_from_zeros(main, [0.7], reference=(0.5, 2.0))
        at_ref = delta_from_zeros(main, [0.5], reference=(0.5, 2.0))
        assert at_ref[0] == pytest.approx(2.0)
        assert np.isfinite(value[0])

    def test_difference_terms_telescope(self, config3, smooth3, zero3):
        """Сумма слагаемых равна разности произведений."""
        first = locate_spectrum(smooth3, 6, config3)
        second = locate_spectrum(zero3, 6, config3)
        lam = np.array([0.6, 3.3])
        terms = product_difference_terms(first, second, lam)
        difference = delta_from_zeros(first, lam) - delta_from_zeros(second, lam)
        assert terms.shape == (3, 2)
        assert np.allclose(terms.sum(axis=0), difference, atol=1e-12)

    def test_difference_terms_shape_mismatch(self, config3, zero3):
        """Спектры разной длины не сравниваются."""
        with pytest.raises(InvalidInputError):
            product_difference_terms(locate_spectrum(zero3, 3, config3), locate_spectrum(zero3, 4, config3), [1.5])

    @pytest.mark.slow
    def test_products_match_integrator(self):
        """Δ по 40 нулям близко к Δ интегратора для гладкого потенциала."""
        config = StarGraphConfig(3, 512)
        v = cosine_potentials(config, (0.1, -0.05, 0.02))
        spectrum = locate_spectrum(v, 40, config)
        lam = np.array([0.7, 2.5, 6.0 + 1.0j])
        direct = StarSystem(v, config).delta(lam)
        assert relative_error(delta_from_zeros(spectrum, lam), direct) < 1e-2
        for aux in locate_aux_spectra(v, 40, config):
            direct_aux = StarSystem(v, config).delta_aux(lam, aux.j - 1)
            assert relative_error(delta_from_zeros(aux, lam), direct_aux) < 1e-2

    @pytest.mark.slow
    def test_products_match_integrator_n200(self):
        """N = 200, нормировка в λ* = −1: Δ по нулям совпадает с интегратором до 10⁻⁵ на 50 точках."""
        config = StarGraphConfig(3, 2048, lambda_max=5e4)
        v = random_in_ball(config, 1.0, seed=8)
        spectrum = locate_spectrum(v, 200, config)
        system = StarSystem(v, config)
        lam = np.linspace(-0.5, 60.0, 50) + 1.0j
        direct = system.delta(lam)
        built = delta_from_zeros(spectrum, lam, reference=(-1.0, complex(system.delta(np.array([-1.0]))[0])))
        assert np.max(np.abs(built - direct) / np.abs(direct)) < 1e-5


class TestPartial:
    """Частичные функции и восстановление ребра m."""

    def test_partial_chars_zero_potential(self, config3, zero3):
        """q ≡ 0: Δ^Π = S², B = S² при m = 3."""
        lam = 2.2
        s = np.sin(np.sqrt(lam) * np.pi) / np.sqrt(lam)
        chars = partial_chars(zero3, lam, config3)
        assert chars.delta_pi == pytest.approx(s * s)
        assert chars.B == pytest.approx(s * s)

    @pytest.mark.parametrize("lam", [0.6, 3.7, 2.0 + 1.5j])
    def test_recover_edge_m(self, config3, smooth3, lam):
        """(S_m, S′_m) из Δ, Δ₁ совпадают с интегратором."""
        lam = np.array([lam])
        delta, aux = StarSystem(smooth3, config3).characteristic(lam)
        s_m, sp_m = recover_edge_m(smooth3.potentials[:-1], delta, aux[0], lam, config3)
        fs = EdgePropagator(smooth3[2]).propagate(lam)
        assert relative_error(s_m, fs.s) < 1e-8
        assert relative_error(sp_m, fs.sp) < 1e-8

    @pytest.mark.slow
    def test_recover_edge_m_ensemble(self, config3):
        """10 случайных потенциалов, 50 точек λ: восстановление S_m до 10⁻⁸."""
        lam = np.linspace(0.3, 40.0, 50) + 1.5j
        for seed in range(10):
            v = random_in_ball(config3, 1.0, seed=seed)
            delta, aux = StarSystem(v, config3).characteristic(lam)
            s_m, sp_m = recover_edge_m(v.potentials[:-1], delta, aux[0], lam, config3)
            fs = EdgePropagator(v[2]).propagate(lam)
            assert relative_error(s_m, fs.s) < 1e-8, seed
            assert relative_error(sp_m, fs.sp) < 1e-8, seed

    def test_recover_edge_m_singular(self, config3, zero3):
        """B(λ) = 0 на собственном значении q ≡ 0."""
        lam = np.array([1.0])
        delta, aux = StarSystem(zero3, config3).characteristic(lam)
        with pytest.raises(NearSingularError):
            recover_edge_m(zero3.potentials[:-1], delta, aux[0], lam, config3)

    def test_recover_edge_m_shapes(self, config3, zero3):
        """Формы Δ, Δ₁ и λ должны совпадать."""
        with pytest.raises(InvalidInputError):
            recover_edge_m(zero3.potentials[:-1], [1.0, 2.0], [1.0], [0.5, 0.6], config3)


class TestPaleyWiener:
    """Остатки F, F_k, f, f₁, g, g₁."""

    def test_zero_potential_remainders_vanish(self, config3, zero3):
        """Для q ≡ 0 все остатки равны нулю."""
        remainder = pw_extract(zero3, R=8.0, sample_count=201, partial=True, config=config3)
        assert set(remainder.values) == {"F", "F_1", "F_2", "f", "f1", "g", "g1"}
        for name, norm in remainder.norms.items():
            assert norm < 1e-6, name

    def test_parity(self, config3, smooth3):
        """F нечётна при m = 3, F_k чётны."""
        remainder = pw_extract(smooth3, R=6.0, sample_count=121, config=config3)
        assert remainder.parity["F"] == -1
        assert remainder.parity["F_1"] == 1
        for name in remainder.values:
            scale = max(1.0, float(np.max(np.abs(remainder.values[name]))))
            assert remainder.parity_defect(name) < 1e-8 * scale

    def test_from_spectra(self, config3, zero3):
        """Остатки по спектрам q ≡ 0 тоже исчезают."""
        spectrum = locate_spectrum(zero3, 10, config3)
        aux = locate_aux_spectra(zero3, 10, config3)
        remainder = pw_extract((spectrum, aux), R=6.0, sample_count=121)
        assert remainder.norm("F") < 1e-6
        assert remainder.support["F"] == pytest.approx(3 * np.pi)

    def test_radius_and_samples_checked(self, config3, zero3):
        """R < 2m и чётное число отсчётов отклоняются."""
        with pytest.raises(InvalidInputError):
            pw_extract(zero3, R=5.0, config=config3)
        with pytest.raises(InvalidInputError):
            pw_extract(zero3, R=8.0, sample_count=100, config=config3)

    def test_partial_requires_potentials(self, config3, zero3):
        """Частичные функции по спектрам не строятся."""
        spectrum = locate_spectrum(zero3, 4, config3)
        aux = locate_aux_spectra(zero3, 4, config3)
        with pytest.raises(InvalidInputError):
            pw_extract((spectrum, aux), R=6.0, partial=True)


class TestCauchy:
    """Коэффициенты данных Коши."""

    def test_zero_potential(self, config3, zero3):
        """q ≡ 0: k̂ = ĥ = 0."""
        coefficients = cauchy_coeffs(zero3, 0.5, 10, config3)
        assert coefficients.n.size == 21
        assert coefficients.k_norm < 1e-6
        assert coefficients.h_norm < 1e-6

    def test_symmetry(self, config3, smooth3):
        """k̂_{−n} = conj k̂_n и ĥ_{−n} = −conj ĥ_n."""
        coefficients = cauchy_coeffs(smooth3, 0.5, 10, config3)
        scale = max(1.0, coefficients.k_norm, coefficients.h_norm)
        assert coefficients.symmetry_defect < 1e-8 * scale
        assert coefficients.k_norm > 0

    def test_invalid_shift(self, config3, zero3):
        """α вне (0, 2] отклоняется."""
        with pytest.raises(InvalidInputError):
            cauchy_coeffs(zero3, 0.0, 5, config3)


def test_aux_phase_branch_offsets():
    """Сдвинутые ветви дают нули (n − 1 + φ)² и (n − φ)²."""
    phi = aux_phase(3)
    for b in (phi, 1 - phi):
        assert abs(shifted_product(np.array([b + 2.0]), b)[0]) < 1e-10
