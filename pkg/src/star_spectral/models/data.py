from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.integrate import trapezoid

from star_spectral.errors import InvalidInputError
from star_spectral.models.graph import PotentialVector

WEIGHT_NEG_TOL = 1e-10


@dataclass(frozen=True)
class ClusterSplit:
    """Разбиение вычета α кластера кратности r по его индексам (n, k)."""

    j: int
    lam: float
    indices: tuple[tuple[int, int], ...]
    residue: float
    betas: tuple[float, ...]
    method: str = "equal"


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """α, β формы (N, m, m): ось 0 — n, ось 1 — ветвь k, ось 2 — вершина j."""

    alpha: np.ndarray
    beta: np.ndarray
    splits: tuple[ClusterSplit, ...] = ()
    kappa0: np.ndarray | None = None
    kappa1: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.alpha.shape != self.beta.shape or self.beta.ndim != 3:
            raise InvalidInputError("Массивы α и β должны иметь одинаковую форму (N, m, m)")

    @property
    def N(self) -> int:
        return self.beta.shape[0]

    @property
    def m(self) -> int:
        return self.beta.shape[1]

    @property
    def is_nonnegative(self) -> bool:
        return bool(np.all(self.beta >= -WEIGHT_NEG_TOL))


@dataclass(frozen=True, eq=False)
class WeylSample:
    lambdas: np.ndarray
    values: np.ndarray
    residual: float = 0.0


def _as_float(array, shape: tuple[int, ...], name: str) -> np.ndarray:
    array = np.asarray(array, dtype=float)
    if array.shape != shape:
        raise InvalidInputError(f"{name}: ожидалась форма {shape}, получено {array.shape}")
    if not np.all(np.isfinite(array)):
        raise InvalidInputError(f"{name}: есть нечисловые значения")
    return array


@dataclass(frozen=True, eq=False)
class SpectralDataIP2:
    """Собственные значения λ_nk (N, m) и веса β_nkj (N, m, m).

    known_vertices < m означает, что столбцы j > known_vertices не измерены
    (данные получены из m спектров) и восполняются правилом сумм.
    """

    lambdas: np.ndarray
    betas: np.ndarray
    known_vertices: int | None = None

    def __post_init__(self) -> None:
        lambdas = np.asarray(self.lambdas, dtype=float)
        if lambdas.ndim != 2:
            raise InvalidInputError("λ_nk задаётся матрицей (N, m)")
        N, m = lambdas.shape
        object.__setattr__(self, "lambdas", _as_float(lambdas, (N, m), "λ_nk"))
        betas = _as_float(self.betas, (N, m, m), "β_nkj")
        if np.any(betas < -WEIGHT_NEG_TOL):
            raise InvalidInputError(f"Отрицательный вес β = {betas.min():.3g}")
        object.__setattr__(self, "betas", betas)
        for k in range(m):
            if np.any(np.diff(lambdas[:, k]) < 0):
                raise InvalidInputError(f"Собственные значения ветви k = {k + 1} не упорядочены по n")
        if self.known_vertices is not None and not 1 <= self.known_vertices <= m:
            raise InvalidInputError(f"known_vertices должно быть в 1..{m}, получено {self.known_vertices}")

    @property
    def N(self) -> int:
        return self.lambdas.shape[0]

    @property
    def m(self) -> int:
        return self.lambdas.shape[1]

    @property
    def complete(self) -> bool:
        return self.known_vertices is None or self.known_vertices == self.m

    def truncated(self, N: int) -> "SpectralDataIP2":
        return SpectralDataIP2(self.lambdas[:N], self.betas[:N], self.known_vertices)

    def with_lambda(self, n: int, k: int, lam: float) -> "SpectralDataIP2":
        lambdas = self.lambdas.copy()
        lambdas[n - 1, k - 1] = lam
        return SpectralDataIP2(lambdas, self.betas, self.known_vertices)

    def with_betas(self, betas: np.ndarray) -> "SpectralDataIP2":
        return SpectralDataIP2(self.lambdas, betas, self.known_vertices)

    def to_dict(self) -> dict[str, Any]:
        payload = {"kind": "ip2", "lambdas": self.lambdas.tolist(), "betas": self.betas.tolist()}
        if self.known_vertices is not None:
            payload["known_vertices"] = self.known_vertices
        return payload

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "SpectralDataIP2":
        if payload.get("kind") != "ip2":
            raise InvalidInputError("Ожидались спектральные данные вида ip2")
        try:
            return cls(np.array(payload["lambdas"]), np.array(payload["betas"]), payload.get("known_vertices"))
        except KeyError as e:
            raise InvalidInputError(f"В спектральных данных нет поля {e}") from e


@dataclass(frozen=True, eq=False)
class SpectralDataIP1:
    """Основной спектр (N, m) и m−1 вспомогательных (m−1, N, m), все в λ."""

    main: np.ndarray
    aux: np.ndarray

    def __post_init__(self) -> None:
        main = np.asarray(self.main, dtype=float)
        if main.ndim != 2:
            raise InvalidInputError("Основной спектр задаётся матрицей (N, m)")
        N, m = main.shape
        object.__setattr__(self, "main", _as_float(main, (N, m), "Λ"))
        object.__setattr__(self, "aux", _as_float(self.aux, (m - 1, N, m), "Λ_j"))

    @property
    def N(self) -> int:
        return self.main.shape[0]

    @property
    def m(self) -> int:
        return self.main.shape[1]

    def to_dict(self) -> dict[str, Any]:
        return {"kind": "ip1", "main": self.main.tolist(), "aux": self.aux.tolist()}

    @classmethod
    def from_dict(cls, payload: dict[str, Any]) -> "SpectralDataIP1":
        if payload.get("kind") != "ip1":
            raise InvalidInputError("Ожидались спектральные данные вида ip1")
        try:
            return cls(np.array(payload["main"]), np.array(payload["aux"]))
        except KeyError as e:
            raise InvalidInputError(f"В спектральных данных нет поля {e}") from e


@dataclass(frozen=True)
class StabilityMetrics:
    delta: float
    delta_tilde: float
    per_n: tuple[float, ...]
    per_n_tilde: tuple[float, ...]
    N: int


@dataclass(frozen=True, eq=False)
class AsymptoticReport:
    """Остатки по индексам (N, ветви[, j]) и накопленные l₂-суммы по n."""

    name: str
    remainders: np.ndarray
    cumulative: np.ndarray

    @property
    def total(self) -> float:
        return float(self.cumulative[-1]) if self.cumulative.size else 0.0

    def tail_share(self, start: int) -> float:
        """Доля суммы квадратов, набранная на n ≥ start."""
        if self.total == 0.0:
            return 0.0
        head = self.cumulative[start - 2] if start >= 2 else 0.0
        return float((self.total - head) / self.total)


@dataclass(frozen=True, eq=False)
class PWRemainder:
    rho: np.ndarray
    values: dict[str, np.ndarray]
    support: dict[str, float]
    parity: dict[str, int] = field(default_factory=dict)

    def norm(self, name: str) -> float:
        return float(np.sqrt(trapezoid(np.abs(self.values[name]) ** 2, self.rho)))

    def parity_defect(self, name: str) -> float:
        """max |F(−ρ) − (±1)F(ρ)| на симметричной сетке."""
        values = self.values[name]
        return float(np.max(np.abs(values[::-1] - self.parity[name] * values), initial=0.0))

    @property
    def norms(self) -> dict[str, float]:
        return {name: self.norm(name) for name in self.values}


@dataclass(frozen=True)
class PartialCharacteristicSet:
    lam: complex
    delta_pi: complex
    delta_pi_1: complex
    delta_k: complex
    delta_k_1: complex
    B: complex
    J: complex


@dataclass(frozen=True, eq=False)
class CauchyCoefficients:
    alpha_shift: float
    n: np.ndarray
    nu: np.ndarray
    k_hat: np.ndarray
    h_hat: np.ndarray

    @property
    def mu(self) -> np.ndarray:
        return self.nu * self.nu

    @property
    def k_norm(self) -> float:
        return float(np.linalg.norm(self.k_hat))

    @property
    def h_norm(self) -> float:
        return float(np.linalg.norm(self.h_hat))

    @property
    def symmetry_defect(self) -> float:
        """max |k̂_{−n} − conj k̂_n|, |ĥ_{−n} + conj ĥ_n|."""
        k_def = np.abs(self.k_hat[::-1] - np.conj(self.k_hat))
        h_def = np.abs(self.h_hat[::-1] + np.conj(self.h_hat))
        return float(max(k_def.max(initial=0.0), h_def.max(initial=0.0)))


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    update_norm: float
    rho_mismatch: float
    tail_estimate: float


@dataclass(eq=False)
class ReconstructionResult:
    potentials: PotentialVector
    trace: list[IterationRecord] = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.trace)
