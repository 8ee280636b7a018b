"""Характеристические функции, восстановленные по своим нулям.

Ветвь с асимптотами a_n = n − 1 + b строится как
θ(λ) = θ⁰(λ) Π_{n≤N} (λ_n − λ)/(a_n² − λ), где θ⁰ — точное бесконечное
произведение по невозмущённым нулям a_n²: sin ρπ/ρ для b = 1, cos ρπ для
b = 1/2 и Γ-выражение для сдвинутых ветвей. Хвост n > N тем самым берётся
от невозмущённой задачи.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gamma, loggamma

from star_spectral.errors import InvalidInputError
from star_spectral.models.spectrum import BranchKind, IndexedSpectrum
from star_spectral.ode.closed_forms import rho_of, sin_over_rho

HIT_TOL = 1e-14
HIT_SHIFT = 1e-10


def shifted_product(rho, b: float) -> np.ndarray:
    """Π_{n≥0} (1 − ρ²/(n + b)²) = Γ(b)² sin(π(b − ρ)) Γ(1 − b + ρ) / (π Γ(b + ρ))."""
    rho = np.asarray(rho, dtype=complex)
    return gamma(b) ** 2 / np.pi * np.sin(np.pi * (b - rho)) * np.exp(loggamma(1 - b + rho) - loggamma(b + rho))


def unperturbed_branch(kind: BranchKind, m: int, lam) -> np.ndarray:
    rho = rho_of(lam)
    match kind:
        case BranchKind.SINE:
            return sin_over_rho(rho)
        case BranchKind.COSINE:
            return np.cos(rho * np.pi)
        case _:
            return shifted_product(rho, kind.offset(m))


def _prefactor(kind: BranchKind) -> float:
    # sin ρπ/ρ = π Π(1 − λ/n²); the other branches have unit constant
    return np.pi if kind is BranchKind.SINE else 1.0


@dataclass(frozen=True, eq=False)
class EntireFromZeros:
    kind: BranchKind
    zeros: np.ndarray
    m: int = 3

    def __post_init__(self) -> None:
        zeros = np.asarray(self.zeros, dtype=float)
        if zeros.ndim != 1 or zeros.size == 0:
            raise InvalidInputError("Нули ветви задаются непустым одномерным массивом λ_n, n = 1..N")
        object.__setattr__(self, "zeros", zeros)

    @property
    def N(self) -> int:
        return self.zeros.size

    @property
    def asymptotes(self) -> np.ndarray:
        return np.arange(self.N) + self.kind.offset(self.m)

    def evaluate(self, lam, tail: bool = True) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        a2 = self.asymptotes**2
        if not tail:
            terms = (self.zeros[:, None] - lam[None, :]) / a2[:, None]
            return _prefactor(self.kind) * np.prod(terms, axis=0)
        scale = np.maximum(1.0, np.abs(lam))
        hit = np.any(np.abs(a2[:, None] - lam[None, :]) < HIT_TOL * scale[None, :], axis=0)
        lam = np.where(hit, lam + HIT_SHIFT * scale, lam)
        ratio = np.prod((self.zeros[:, None] - lam[None, :]) / (a2[:, None] - lam[None, :]), axis=0)
        return unperturbed_branch(self.kind, self.m, lam) * ratio


def product_eval(
    zeros,
    N: int,
    lam,
    kind: BranchKind = BranchKind.SINE,
    m: int = 3,
    tail: bool = True,
) -> np.ndarray:
    zeros = np.asarray(zeros, dtype=float)
    if zeros.size < N:
        raise InvalidInputError(f"Задано {zeros.size} нулей, требуется N = {N}")
    return EntireFromZeros(kind, zeros[:N], m).evaluate(lam, tail)


def branch_products(spectrum: IndexedSpectrum) -> list[EntireFromZeros]:
    return [
        EntireFromZeros(kind, spectrum.lambdas[:, k], spectrum.m) for k, kind in enumerate(spectrum.branches)
    ]


def delta_from_zeros(
    spectrum: IndexedSpectrum,
    lam,
    tail: bool = True,
    reference: tuple[complex, complex] | None = None,
) -> np.ndarray:
    """Δ = mΠθ_k по основному спектру или Δ_j = (m − 1)Πθ_k по вспомогательному.

    reference = (λ*, значение) дополнительно нормирует результат в точке λ*.
    """
    m = spectrum.m
    constant = m if BranchKind.COSINE in spectrum.branches else m - 1
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    value = constant * np.prod([p.evaluate(lam, tail) for p in branch_products(spectrum)], axis=0)
    if reference is not None:
        lam_ref, target = reference
        at_ref = constant * np.prod([p.evaluate(np.array([lam_ref]), tail) for p in branch_products(spectrum)])
        value = value * (target / at_ref)
    return value


def product_difference_terms(first: IndexedSpectrum, second: IndexedSpectrum, lam) -> np.ndarray:
    """Слагаемые телескопического разложения Δ⁽¹⁾ − Δ⁽²⁾ по ветвям, форма (m, L).

    Слагаемое k равно c (θ_k⁽¹⁾ − θ_k⁽²⁾) Π_{i<k} θ_i⁽²⁾ Π_{i>k} θ_i⁽¹⁾, их сумма — разность.
    """
    if first.m != second.m or first.N != second.N or first.branches != second.branches:
        raise InvalidInputError("Спектры должны иметь одинаковые m, N и таблицу ветвей")
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    constant = first.m if BranchKind.COSINE in first.branches else first.m - 1
    theta1 = np.array([p.evaluate(lam) for p in branch_products(first)])
    theta2 = np.array([p.evaluate(lam) for p in branch_products(second)])
    terms = []
    for k in range(first.m):
        before = np.prod(theta2[:k], axis=0) if k else np.ones_like(lam)
        after = np.prod(theta1[k + 1 :], axis=0) if k + 1 < first.m else np.ones_like(lam)
        terms.append(constant * (theta1[k] - theta2[k]) * before * after)
    return np.array(terms)
