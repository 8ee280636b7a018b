from abc import ABC, abstractmethod

import numpy as np

from star_spectral.models.spectrum import BranchKind
from star_spectral.ode.engine import StarSystem


class CharacteristicFunction(ABC):
    """Целая функция, нули которой — занумерованный спектр.

    Наследники задают степень ρ-масштабирования, таблицу ветвей и границы
    оболочек; поиск и нумерация нулей от конкретной функции не зависят.
    """

    def __init__(self, system: StarSystem) -> None:
        self.system = system

    @property
    def m(self) -> int:
        return self.system.m

    @property
    @abstractmethod
    def power(self) -> int:
        pass

    @abstractmethod
    def branches(self) -> list[BranchKind]:
        pass

    @abstractmethod
    def values(self, lam) -> np.ndarray:
        pass

    @abstractmethod
    def leading(self, rho) -> np.ndarray:
        pass

    @abstractmethod
    def shell_edge(self, n: int) -> float:
        """Правая граница оболочки n по ρ; shell_edge(0) — левая граница первой."""

    def scaled(self, rho) -> np.ndarray:
        rho = np.asarray(rho)
        return rho**self.power * self.values(rho * rho)

    def asymptotes(self, n: int) -> np.ndarray:
        return np.array([n - 1 + b.offset(self.m) for b in self.branches()])

    @property
    def label(self) -> str:
        return type(self).__name__
