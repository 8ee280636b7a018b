"""Тесты интегратора и характеристических функций."""

import numpy as np
import pytest

from star_spectral.errors import OutOfRangeError
from star_spectral.models.graph import Potential, PotentialVector, StarGraphConfig
from star_spectral.ode.closed_forms import leading_delta, zero_basis, zero_delta, zero_delta_aux
from star_spectral.ode.engine import EdgePropagator, StarSystem, char_delta, edge_basis, scaled_char

from tests.conftest import cosine_potentials


class TestEdgePropagator:
    """Тесты решений S, C на ребре."""

    def test_zero_potential_matches_closed_form(self):
        """q ≡ 0: S(π) = sin ρπ/ρ, C(π) = cos ρπ, включая λ < 0 и комплексные λ."""
        lam = np.array([-3.0, 0.0, 0.25, 1.0, 7.3, 2.0 + 1.5j])
        fs = EdgePropagator(Potential.zero(128)).propagate(lam)
        s, sp, c, cp = zero_basis(lam)
        for got, want in ((fs.s, s), (fs.sp, sp), (fs.c, c), (fs.cp, cp)):
            assert np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want))) < 1e-11

    def test_constant_potential_is_shift(self):
        """Постоянный потенциал q ≡ c сдвигает λ на c."""
        fs = EdgePropagator(Potential(np.full(129, 0.7))).propagate(np.array([3.0]))
        s, sp, _, _ = zero_basis(np.array([3.0 - 0.7]))
        assert abs(fs.s[0] - s[0]) < 1e-12
        assert abs(fs.sp[0] - sp[0]) < 1e-12

    def test_wronskian_is_one(self, smooth3):
        """C S′ − C′ S = 1 для любого потенциала."""
        fs = EdgePropagator(smooth3[0]).propagate(np.linspace(0.5, 200.0, 41))
        assert np.max(np.abs(fs.wronskian - 1.0)) < 1e-10

    def test_fourth_order_convergence(self):
        """Удвоение сетки уменьшает ошибку примерно в 16 раз."""
        lam = np.array([10.0])

        def value(M):
            p = Potential.from_function(lambda x: np.exp(np.sin(3 * x)), M)
            return EdgePropagator(p).propagate(lam).s[0]

        reference = value(2048)
        coarse, fine = abs(value(64) - reference), abs(value(128) - reference)
        assert 10.0 < coarse / fine < 24.0

    def test_out_of_range(self):
        """|λ| выше предела сетки — ошибка диапазона."""
        with pytest.raises(OutOfRangeError) as info:
            EdgePropagator(Potential.zero(64), lambda_limit=40.96).propagate(np.array([100.0]))
        assert info.value.limit == pytest.approx(40.96)

    def test_traces_shape(self):
        """Трассы возвращаются на всей сетке."""
        fs = EdgePropagator(Potential.zero(64)).propagate(np.array([1.0, 2.0]), trace=True)
        assert fs.s_trace.shape == (65, 2)
        assert fs.s_trace[0] == pytest.approx([0.0, 0.0])
        assert fs.sp_trace[0] == pytest.approx([1.0, 1.0])

    def test_edge_basis_scalar(self, config3):
        """edge_basis возвращает значения в точке π и вронскиан."""
        basis = edge_basis(Potential.zero(config3.grid_points), 4.0, config3)
        assert basis.S_end == pytest.approx(0.0, abs=1e-12)
        assert basis.wronskian == pytest.approx(1.0)


class TestStarSystem:
    """Тесты Δ и Δ_j."""

    @pytest.mark.parametrize("m", [2, 3, 5])
    def test_zero_potential_delta(self, m):
        """q ≡ 0: Δ = m S^{m−1} S′ и Δ_j по замкнутым формулам."""
        config = StarGraphConfig(m, 128)
        lam = np.array([-2.0, 0.3, 1.7, 9.5])
        delta, aux = StarSystem(PotentialVector.zero(config), config).characteristic(lam)
        expected = zero_delta(m, lam)
        assert np.max(np.abs(delta - expected) / np.maximum(1.0, np.abs(expected))) < 1e-10
        expected_aux = zero_delta_aux(m, lam)
        for j in range(m):
            assert np.max(np.abs(aux[j] - expected_aux) / np.maximum(1.0, np.abs(expected_aux))) < 1e-10

    def test_delta_is_symmetric_in_edges(self, config3):
        """Перестановка рёбер не меняет Δ."""
        v = cosine_potentials(config3, (0.1, -0.05, 0.02))
        w = PotentialVector(tuple(reversed(v.potentials)))
        lam = np.array([0.5, 3.0, 11.0])
        assert np.allclose(StarSystem(v).delta(lam), StarSystem(w).delta(lam), atol=1e-12)

    def test_scaled_leading_term(self, config3, smooth3):
        """ρ^{m−1}Δ(ρ²) близко к m sin^{m−1}ρπ cos ρπ при больших ρ."""
        rho = 12.3
        value, aux = scaled_char(smooth3, rho, config3)
        assert aux.shape == (2,)
        assert abs(value - leading_delta(3, rho).real) < 0.05

    def test_char_delta_aux_excludes_last(self, config3, zero3):
        """CharValues.delta_aux содержит Δ_1..Δ_{m−1}."""
        values = char_delta(zero3, 2.0, config3)
        assert values.delta_j.shape == (3,)
        assert values.delta_aux.shape == (2,)
