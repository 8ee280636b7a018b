"""Восстановление потенциалов по спектральным данным (λ_nk, β_nkj).

Разностная формула метода спектральных отображений
q⁽¹⁾_j − q⁽²⁾_j = 2 Σ_{n,k} Σ_i (−1)^i β⁽ⁱ⁾_nkj d/dx(S⁽¹⁾_j S⁽²⁾_j)(x, λ⁽ⁱ⁾_nk)
используется как итерация: сторона (1) — целевые данные, сторона (2) —
текущее приближение, решения стороны (1) заменяются текущими.
"""

import logging
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from star_spectral.errors import InvalidInputError, NoConvergenceError
from star_spectral.inverse.metrics import ip2_terms
from star_spectral.models.data import IterationRecord, ReconstructionResult, SpectralDataIP2
from star_spectral.models.graph import Potential, PotentialVector, StarGraphConfig
from star_spectral.ode.engine import StarSystem
from star_spectral.spectral.forward import edge_norms, fill_last_vertex, forward_ip2

log = logging.getLogger(__name__)

DIVERGENCE_STREAK = 3
DIVERGENCE_FACTOR = 2.0


@dataclass(frozen=True)
class ReconstructOptions:
    max_iters: int = 30
    tol: float = 1e-8
    damping: float = 1.0
    grid_points: int = 512

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise InvalidInputError(f"max_iters должно быть ≥ 1, получено {self.max_iters}")
        if not self.tol > 0:
            raise InvalidInputError(f"tol должно быть положительным, получено {self.tol}")
        if not 0 < self.damping <= 1:
            raise InvalidInputError(f"Коэффициент демпфирования должен лежать в (0, 1], получено {self.damping}")


def _series_terms(system: StarSystem, lambdas: np.ndarray, betas: np.ndarray) -> np.ndarray:
    """Σ_{n,k} β_nkj · 2S_jS′_j(x, λ_nk) по рёбрам, форма (m, M+1)."""
    terms = []
    for j, fs in enumerate(system.fundamentals(lambdas.ravel(), trace=True)):
        weights = betas[:, :, j].ravel()
        terms.append(2.0 * np.real(fs.s_trace * fs.sp_trace) @ weights)
    return np.array(terms)


def born_update(
    current: PotentialVector,
    target: SpectralDataIP2,
    current_data: SpectralDataIP2,
    config: StarGraphConfig,
) -> np.ndarray:
    """Поправка Δq_j(x) формы (m, M+1) по паре данных (цель, текущее)."""
    system = StarSystem(current, config)
    return 2.0 * (
        _series_terms(system, current_data.lambdas, current_data.betas)
        - _series_terms(system, target.lambdas, target.betas)
    )


def reconstruct(
    data: SpectralDataIP2,
    options: ReconstructOptions | None = None,
    initial: PotentialVector | None = None,
    progress_callback: Callable[[int, int, str], None] | None = None,
) -> ReconstructionResult:
    options = options or ReconstructOptions()
    m, N = data.m, data.N
    config = StarGraphConfig(m, options.grid_points)
    start = initial or PotentialVector.zero(config)
    current = PotentialVector(start.resample(options.grid_points).normalized().potentials)
    x = config.nodes
    trace: list[IterationRecord] = []
    growth = 0
    best, best_norm = current, np.inf

    for iteration in range(1, options.max_iters + 1):
        target = data
        if not data.complete:
            system = StarSystem(current, config)
            norms = edge_norms(system, data.lambdas.ravel()).reshape(m, N, m)
            target = data.with_betas(fill_last_vertex(data.lambdas, data.betas, norms, data.known_vertices))
        spectrum, weights = forward_ip2(current, N, config, reference=target)
        current_data = SpectralDataIP2(spectrum.lambdas, weights.beta)
        update = options.damping * born_update(current, target, current_data, config)
        update_norm = float(sum(np.sqrt(simpson(u**2, x=x)) for u in update))
        terms = ip2_terms(target, current_data)
        rho_mismatch = float(np.sqrt(np.sum(np.abs(np.sqrt(target.lambdas.astype(complex)) - spectrum.rhos) ** 2)))
        record = IterationRecord(
            iteration=iteration,
            update_norm=update_norm,
            rho_mismatch=rho_mismatch,
            tail_estimate=float(N * terms[-1].max()),
        )
        trace.append(record)
        log.info(
            "iteration %d: |dq| = %.3e, rho mismatch = %.3e", iteration, update_norm, rho_mismatch
        )
        if progress_callback:
            progress_callback(iteration, options.max_iters, f"|Δq| = {update_norm:.3e}")

        if update_norm < options.tol:
            return ReconstructionResult(current, trace, converged=True)
        if update_norm < best_norm:
            best, best_norm = current, update_norm
        if len(trace) > 1 and update_norm > trace[-2].update_norm:
            growth += 1
        else:
            growth = 0
        if growth >= DIVERGENCE_STREAK:
            if update_norm > DIVERGENCE_FACTOR * best_norm:
                raise NoConvergenceError(
                    f"Итерация расходится: норма поправки растёт {DIVERGENCE_STREAK} шага подряд "
                    f"(последняя {update_norm:.3e}, лучшая {best_norm:.3e})",
                    trace=trace,
                )
            # рост в пределах шума: итерация упёрлась в точность прямой задачи
            warnings.warn(
                f"Реконструкция остановилась на уровне |Δq| = {best_norm:.3e}; возвращено лучшее приближение",
                stacklevel=2,
            )
            return ReconstructionResult(best, trace, converged=False)
        if log.isEnabledFor(logging.DEBUG):
            per_edge = [float(np.sqrt(simpson(u**2, x=x))) for u in update]
            log.debug("update norms by edge: %s", np.array2string(np.array(per_edge), precision=3))
        stepped = PotentialVector(tuple(Potential(p.samples + u) for p, u in zip(current.potentials, update)))
        current = PotentialVector(stepped.normalized().potentials)

    warnings.warn(
        f"Реконструкция не сошлась за {options.max_iters} итераций (|Δq| = {trace[-1].update_norm:.3e})",
        stacklevel=2,
    )
    return ReconstructionResult(current, trace, converged=False)
