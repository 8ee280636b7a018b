from typing import Sequence

import numpy as np

from star_spectral.errors import InvalidInputError, NearSingularError
from star_spectral.models.data import PartialCharacteristicSet
from star_spectral.models.graph import Potential, PotentialVector, StarGraphConfig
from star_spectral.ode.closed_forms import rho_of
from star_spectral.ode.engine import EdgePropagator, StarSystem

SINGULAR_TOL = 1e-8


def _first_edges(potentials: Sequence[Potential], lam: np.ndarray, limit: float):
    systems = [EdgePropagator(p, limit).propagate(lam) for p in potentials]
    return (
        np.array([f.s for f in systems]),
        np.array([f.sp for f in systems]),
        np.array([f.c for f in systems]),
        np.array([f.cp for f in systems]),
    )


def partial_arrays(potentials: Sequence[Potential], lam, limit: float = np.inf) -> dict[str, np.ndarray]:
    """Δ^Π, Δ^Π₁, Δ^K, Δ^K₁ и B по первым m − 1 рёбрам.

    Пустые произведения (m = 2) равны 1.
    """
    if len(potentials) < 1:
        raise InvalidInputError("Нужен хотя бы один потенциал ребра")
    lam = np.atleast_1d(np.asarray(lam))
    s, sp, c, cp = _first_edges(potentials, lam, limit)
    rest = np.prod(s[1:], axis=0) if len(potentials) > 1 else np.ones_like(s[0])
    rest_k = np.zeros_like(s[0])
    for j in range(1, len(potentials)):
        others = [i for i in range(1, len(potentials)) if i != j]
        rest_k = rest_k + sp[j] * (np.prod(s[others], axis=0) if others else 1.0)
    return {
        "delta_pi": s[0] * rest,
        "delta_pi_1": c[0] * rest,
        "delta_k": sp[0] * rest + s[0] * rest_k,
        "delta_k_1": cp[0] * rest + c[0] * rest_k,
        "B": rest * rest,
    }


def partial_chars(v: PotentialVector, lam: complex, config: StarGraphConfig | None = None) -> PartialCharacteristicSet:
    system = StarSystem(v, config)
    limit = system.config.effective_lambda_max
    parts = partial_arrays(system.potentials.potentials[:-1], np.array([lam]), limit)
    delta, aux = system.characteristic(np.array([lam]))
    J = delta * parts["delta_pi_1"] - aux[0] * parts["delta_pi"]
    return PartialCharacteristicSet(
        lam=complex(lam),
        delta_pi=complex(parts["delta_pi"][0]),
        delta_pi_1=complex(parts["delta_pi_1"][0]),
        delta_k=complex(parts["delta_k"][0]),
        delta_k_1=complex(parts["delta_k_1"][0]),
        B=complex(parts["B"][0]),
        J=complex(J[0]),
    )


def recover_edge_m(
    v_without_m: Sequence[Potential],
    delta_values,
    delta1_values,
    lam,
    config: StarGraphConfig | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """(S_m(π, λ), S′_m(π, λ)) из Δ, Δ₁ и первых m − 1 потенциалов.

    S_m = (ΔΔ^Π₁ − Δ₁Δ^Π)/B, S′_m = (Δ₁Δ^K − ΔΔ^K₁)/B; определитель системы
    равен B в силу единичного вронскиана на ребре 1.
    """
    lam = np.atleast_1d(np.asarray(lam))
    delta = np.atleast_1d(np.asarray(delta_values))
    delta1 = np.atleast_1d(np.asarray(delta1_values))
    if not (delta.shape == delta1.shape == lam.shape):
        raise InvalidInputError("Δ, Δ₁ и λ должны иметь одинаковую форму")
    m = len(v_without_m) + 1
    limit = config.effective_lambda_max if config else np.inf
    parts = partial_arrays(v_without_m, lam, limit)
    B = parts["B"]
    scaled = np.abs(B) * np.abs(rho_of(lam)) ** (2 * (m - 2))
    bad = np.flatnonzero(scaled < SINGULAR_TOL)
    if bad.size:
        raise NearSingularError(
            f"B(λ) ≈ 0 при λ = {complex(lam[bad[0]]):.12g}; выберите другую точку",
            lam=complex(lam[bad[0]]),
        )
    s_m = (delta * parts["delta_pi_1"] - delta1 * parts["delta_pi"]) / B
    sp_m = (delta1 * parts["delta_k"] - delta * parts["delta_k_1"]) / B
    return s_m, sp_m
