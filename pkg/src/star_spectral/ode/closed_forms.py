"""Замкнутые формулы для нулевого потенциала q ≡ 0 и ведущие члены асимптотик."""

import numpy as np

SMALL_RHO = 1e-4


def rho_of(lam) -> np.ndarray:
    """Ветвь ρ = √λ с Re ρ ≥ 0; для отрицательного λ ρ = i√|λ|."""
    rho = np.sqrt(np.asarray(lam, dtype=complex))
    flip = (rho.real < 0) | ((rho.real == 0) & (rho.imag < 0))
    return np.where(flip, -rho, rho)


def sin_over_rho(rho, x=np.pi) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    small = np.abs(rho) < SMALL_RHO
    safe = np.where(small, 1.0, rho)
    r2 = rho * rho
    series = x - r2 * x**3 / 6.0 + r2 * r2 * x**5 / 120.0
    return np.where(small, series, np.sin(safe * x) / safe)


def zero_basis(lam, x=np.pi) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(S, S', C, C') в точке x при q ≡ 0."""
    rho = rho_of(lam)
    s = sin_over_rho(rho, x)
    c = np.cos(rho * x)
    return s, c, c, -(rho * rho) * s


def leading_delta(m: int, rho) -> np.ndarray:
    """m sin^{m−1}ρπ cos ρπ — ведущий член ρ^{m−1}Δ(ρ²)."""
    rho = np.asarray(rho, dtype=complex)
    return m * np.sin(rho * np.pi) ** (m - 1) * np.cos(rho * np.pi)


def leading_delta_aux(m: int, rho) -> np.ndarray:
    """sin^{m−2}ρπ (m cos²ρπ − 1) — ведущий член ρ^{m−2}Δ_j(ρ²)."""
    rho = np.asarray(rho, dtype=complex)
    return np.sin(rho * np.pi) ** (m - 2) * (m * np.cos(rho * np.pi) ** 2 - 1.0)


def zero_delta(m: int, lam) -> np.ndarray:
    s, sp, _, _ = zero_basis(lam)
    return m * s ** (m - 1) * sp


def zero_delta_aux(m: int, lam) -> np.ndarray:
    s, sp, c, cp = zero_basis(lam)
    return cp * s ** (m - 1) + c * (m - 1) * sp * s ** (m - 2)


def aux_phase(m: int) -> float:
    """φ = arccos(1/√m)/π."""
    return float(np.arccos(1.0 / np.sqrt(m)) / np.pi)


def main_asymptotes(m: int, n: int) -> np.ndarray:
    return np.array([float(n)] * (m - 1) + [n - 0.5])


def aux_asymptotes(m: int, n: int) -> np.ndarray:
    phi = aux_phase(m)
    return np.array([float(n)] * (m - 2) + [n - 1 + phi, n - phi])


def partial_leading(m: int, rho) -> dict[str, np.ndarray]:
    """Ведущие члены ρ-масштабированных Δ^Π, Δ^Π_1, Δ^K, Δ^K_1."""
    rho = np.asarray(rho, dtype=complex)
    s = np.sin(rho * np.pi)
    c = np.cos(rho * np.pi)
    g1 = -rho * s ** (m - 1)
    if m > 2:
        g1 = g1 + (m - 2) * rho * s ** (m - 3) * c**2
    return {
        "f": rho * s ** (m - 1),
        "f1": rho * s ** (m - 2) * c,
        "g": (m - 1) * rho * s ** (m - 2) * c,
        "g1": g1,
    }
