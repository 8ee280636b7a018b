from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from star_spectral.errors import InvalidInputError
from star_spectral.ode.closed_forms import aux_phase

CLUSTER_TOL = 1e-9


class BranchKind(Enum):
    SINE = "sine"
    COSINE = "cosine"
    AUX_LOW = "aux_low"
    AUX_HIGH = "aux_high"

    def offset(self, m: int) -> float:
        """b в асимптоте a_n = n − 1 + b."""
        match self:
            case BranchKind.SINE:
                return 1.0
            case BranchKind.COSINE:
                return 0.5
            case BranchKind.AUX_LOW:
                return aux_phase(m)
            case BranchKind.AUX_HIGH:
                return 1.0 - aux_phase(m)


def main_branches(m: int) -> list[BranchKind]:
    return [BranchKind.SINE] * (m - 1) + [BranchKind.COSINE]


def aux_branches(m: int) -> list[BranchKind]:
    return [BranchKind.SINE] * (m - 2) + [BranchKind.AUX_LOW, BranchKind.AUX_HIGH]


@dataclass(frozen=True)
class IndexedEigenvalue:
    n: int
    k: int
    lam: float
    rho: float
    multiplicity: int = 1
    remainder: float = 0.0
    negative: bool = False
    cluster: int = 0

    @property
    def kappa_remainder(self) -> float:
        return self.remainder


@dataclass(frozen=True)
class IndexedSpectrum:
    """Занумерованные собственные значения: N оболочек по m ветвей."""

    m: int
    N: int
    entries: tuple[IndexedEigenvalue, ...]
    branches: tuple[BranchKind, ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.entries) != self.m * self.N:
            raise InvalidInputError(
                f"Ожидалось {self.m * self.N} собственных значений, получено {len(self.entries)}"
            )
        if not self.branches:
            object.__setattr__(self, "branches", tuple(main_branches(self.m)))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def entry(self, n: int, k: int) -> IndexedEigenvalue:
        return self.entries[(n - 1) * self.m + (k - 1)]

    @property
    def lambdas(self) -> np.ndarray:
        """λ_nk формы (N, m)."""
        return np.array([e.lam for e in self.entries]).reshape(self.N, self.m)

    @property
    def rhos(self) -> np.ndarray:
        """ρ_nk формы (N, m); для λ < 0 ρ = i√|λ|."""
        return _rho_matrix(self.lambdas)

    @property
    def remainders(self) -> np.ndarray:
        return np.array([e.remainder for e in self.entries]).reshape(self.N, self.m)

    @property
    def asymptotes(self) -> np.ndarray:
        n = np.arange(1, self.N + 1)[:, None]
        offsets = np.array([b.offset(self.m) for b in self.branches])[None, :]
        return n - 1 + offsets

    def branch_zeros(self, k: int) -> np.ndarray:
        return self.lambdas[:, k - 1]

    def clusters(self) -> list[list[IndexedEigenvalue]]:
        groups: dict[int, list[IndexedEigenvalue]] = {}
        for e in self.entries:
            groups.setdefault(e.cluster, []).append(e)
        return [groups[c] for c in sorted(groups)]

    @property
    def has_negative(self) -> bool:
        return any(e.negative for e in self.entries)


@dataclass(frozen=True)
class Spectrum(IndexedSpectrum):
    pass


@dataclass(frozen=True)
class AuxSpectrum(IndexedSpectrum):
    j: int = 1

    def __post_init__(self) -> None:
        if not self.branches:
            object.__setattr__(self, "branches", tuple(aux_branches(self.m)))
        super().__post_init__()

    @property
    def xi(self) -> np.ndarray:
        return self.remainders


def _rho_matrix(lambdas: np.ndarray) -> np.ndarray:
    lambdas = np.asarray(lambdas, dtype=float)
    if np.all(lambdas >= 0):
        return np.sqrt(lambdas)
    return np.sqrt(lambdas.astype(complex))


def remainder_of(n: int, rho: complex, asymptote: float) -> float:
    """nπ(ρ − a); для отрицательного λ берётся Re ρ = 0."""
    return float(n * np.pi * (np.real(rho) - asymptote))


def assign_clusters(lambdas: list[float], tol: float = CLUSTER_TOL) -> list[int]:
    """Номер кластера для каждого λ: равные с точностью tol·max(1,|λ|) значения в одном кластере."""
    order = np.argsort(lambdas, kind="stable")
    labels = [0] * len(lambdas)
    current = -1
    previous = None
    for idx in order:
        lam = lambdas[idx]
        if previous is None or abs(lam - previous) > tol * max(1.0, abs(lam)):
            current += 1
        labels[idx] = current
        previous = lam
    return labels


def build_spectrum(
    m: int,
    N: int,
    lambdas: np.ndarray,
    branches: list[BranchKind],
    multiplicities: np.ndarray | None = None,
    j: int | None = None,
) -> IndexedSpectrum:
    """Собирает спектр из матрицы λ (N, m), уже упорядоченной по ветвям."""
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.shape != (N, m):
        raise InvalidInputError(f"Матрица собственных значений должна иметь форму ({N}, {m}), получено {lambdas.shape}")
    labels = assign_clusters(list(lambdas.ravel()))
    counts: dict[int, int] = {}
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
    entries = []
    for idx, lam in enumerate(lambdas.ravel()):
        n, k = divmod(idx, m)
        n += 1
        rho = complex(np.sqrt(complex(lam)))
        asymptote = n - 1 + branches[k].offset(m)
        mult = int(multiplicities.ravel()[idx]) if multiplicities is not None else counts[labels[idx]]
        entries.append(
            IndexedEigenvalue(
                n=n,
                k=k + 1,
                lam=float(lam),
                rho=float(rho.real) if lam >= 0 else float(rho.imag),
                multiplicity=mult,
                remainder=remainder_of(n, rho, asymptote),
                negative=bool(lam < 0),
                cluster=labels[idx],
            )
        )
    if j is None:
        return Spectrum(m, N, tuple(entries), tuple(branches))
    return AuxSpectrum(m, N, tuple(entries), tuple(branches), j=j)
