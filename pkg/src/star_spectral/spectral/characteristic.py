import numpy as np

from star_spectral.errors import InvalidInputError
from star_spectral.models.spectrum import BranchKind, aux_branches, main_branches
from star_spectral.ode.closed_forms import aux_phase, leading_delta, leading_delta_aux
from star_spectral.ode.engine import StarSystem
from star_spectral.spectral.base import CharacteristicFunction


class MainCharacteristic(CharacteristicFunction):
    """ρ^{m−1}Δ(ρ²); оболочки (n − 3/4, n + 1/4]."""

    @property
    def power(self) -> int:
        return self.m - 1

    def branches(self) -> list[BranchKind]:
        return main_branches(self.m)

    def values(self, lam) -> np.ndarray:
        return self.system.delta(lam)

    def leading(self, rho) -> np.ndarray:
        return leading_delta(self.m, rho)

    def shell_edge(self, n: int) -> float:
        return n + 0.25


class AuxCharacteristic(CharacteristicFunction):
    """ρ^{m−2}Δ_j(ρ²): условие Неймана в вершине v_j; оболочки (n − 1 + φ/2, n + φ/2]."""

    def __init__(self, system: StarSystem, j: int) -> None:
        super().__init__(system)
        if not 1 <= j <= system.m:
            raise InvalidInputError(f"Номер вершины j должен быть в 1..{system.m}, получено {j}")
        self.j = j
        self._phase = aux_phase(system.m)

    @property
    def power(self) -> int:
        return self.m - 2

    def branches(self) -> list[BranchKind]:
        return aux_branches(self.m)

    def values(self, lam) -> np.ndarray:
        return self.system.delta_aux(lam, self.j - 1)

    def leading(self, rho) -> np.ndarray:
        return leading_delta_aux(self.m, rho)

    def shell_edge(self, n: int) -> float:
        return n + 0.5 * self._phase

    @property
    def label(self) -> str:
        return f"AuxCharacteristic(j={self.j})"
