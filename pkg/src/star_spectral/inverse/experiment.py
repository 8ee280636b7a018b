"""Эмпирическая проверка равномерной устойчивости на ансамбле пар из шара P_Q."""

import logging
import statistics
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Any, Callable

import numpy as np

from star_spectral.errors import InvalidInputError, StarSpectralError
from star_spectral.inverse.metrics import ip1_metrics
from star_spectral.inverse.reconstruct import ReconstructOptions, reconstruct
from star_spectral.models.data import SpectralDataIP1, SpectralDataIP2
from star_spectral.models.graph import StarGraphConfig, random_in_ball
from star_spectral.spectral.forward import forward_ip2, locate_aux_spectra

log = logging.getLogger(__name__)

DISTINCT_ATTEMPTS = 8


@dataclass(frozen=True)
class PairTask:
    index: int
    seeds: tuple[int, int]
    Q: float
    N: int
    edge_count: int
    grid_points: int
    lambda_max: float
    modes: int
    reconstruct_options: ReconstructOptions | None = None


@dataclass
class PairResult:
    index: int
    seeds: tuple[int, int]
    delta: float = float("nan")
    delta_tilde: float = float("nan")
    lhs: float = float("nan")
    ratio: float = float("nan")
    ratio_delta: float = float("nan")
    reconstruction_lhs: float | None = None
    reconstruction_ratio: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_row(self) -> dict[str, Any]:
        return {
            "pair": self.index,
            "seed_1": self.seeds[0],
            "seed_2": self.seeds[1],
            "delta": self.delta,
            "delta_tilde": self.delta_tilde,
            "lhs": self.lhs,
            "ratio": self.ratio,
            "ratio_delta": self.ratio_delta,
            "reconstruction_lhs": self.reconstruction_lhs,
            "reconstruction_ratio": self.reconstruction_ratio,
            "error": self.error,
        }


@dataclass
class StabilityReport:
    Q: float
    N: int
    seed: int
    pairs: list[PairResult] = field(default_factory=list)

    @property
    def ratios(self) -> list[float]:
        return [p.ratio for p in self.pairs if p.ok]

    @property
    def max_ratio(self) -> float:
        return max(self.ratios, default=float("nan"))

    @property
    def median_ratio(self) -> float:
        return statistics.median(self.ratios) if self.ratios else float("nan")

    @property
    def failures(self) -> int:
        return sum(1 for p in self.pairs if not p.ok)

    def summary(self) -> dict[str, Any]:
        ratios_delta = [p.ratio_delta for p in self.pairs if p.ok]
        return {
            "Q": self.Q,
            "N": self.N,
            "seed": self.seed,
            "pairs": len(self.pairs),
            "failures": self.failures,
            "max_ratio": self.max_ratio,
            "median_ratio": self.median_ratio,
            "max_ratio_delta": max(ratios_delta, default=float("nan")),
        }


def pair_seeds(seed: int, ensemble_size: int) -> list[tuple[int, int]]:
    """Независимые пары зёрен из numpy.random.SeedSequence(seed)."""
    children = np.random.SeedSequence(seed).spawn(ensemble_size)
    return [tuple(int(s) for s in child.generate_state(2)) for child in children]


def _forward(v, task: PairTask, config: StarGraphConfig, reference: SpectralDataIP2 | None = None):
    spectrum, weights = forward_ip2(v, task.N, config, reference)
    data = SpectralDataIP2(spectrum.lambdas, weights.beta)
    aux = locate_aux_spectra(v, task.N, config)
    spectra = SpectralDataIP1(spectrum.lambdas, np.array([a.lambdas for a in aux]))
    return data, spectra


def _run_pair(task: PairTask) -> PairResult:
    result = PairResult(task.index, task.seeds)
    config = StarGraphConfig(task.edge_count, task.grid_points, task.lambda_max)
    try:
        first = random_in_ball(config, task.Q, task.seeds[0], task.modes)
        second_seed = task.seeds[1]
        for _ in range(DISTINCT_ATTEMPTS):
            second = random_in_ball(config, task.Q, second_seed, task.modes)
            if first.distance(second) > 0:
                break
            second_seed += 1
        else:
            raise InvalidInputError(f"Не удалось получить различные потенциалы для пары {task.index}")
        result.seeds = (task.seeds[0], second_seed)

        data1, spectra1 = _forward(first, task, config)
        data2, spectra2 = _forward(second, task, config, reference=data1)
        m = ip1_metrics(data1, data2, spectra1, spectra2)
        result.delta, result.delta_tilde = m.delta, m.delta_tilde
        result.lhs = first.distance(second)
        result.ratio = result.lhs / m.delta_tilde
        result.ratio_delta = result.lhs / m.delta

        if task.reconstruct_options is not None:
            rec1 = reconstruct(data1, task.reconstruct_options)
            rec2 = reconstruct(data2, task.reconstruct_options)
            result.reconstruction_lhs = rec1.potentials.distance(rec2.potentials)
            result.reconstruction_ratio = result.reconstruction_lhs / m.delta_tilde
    except (StarSpectralError, ValueError, ArithmeticError) as e:
        result.error = f"{type(e).__name__}: {e}"
    return result


def stability_experiment(
    Q: float,
    ensemble_size: int,
    N: int,
    seed: int,
    config: StarGraphConfig | None = None,
    workers: int = 1,
    modes: int = 8,
    reconstruct_options: ReconstructOptions | None = None,
    progress_callback: Callable[[int, int, str], None] | None = None,
) -> StabilityReport:
    """Отношения Σ‖q⁽¹⁾_j − q⁽²⁾_j‖/δ̃ и /δ по ансамблю случайных пар.

    Ошибка в отдельной паре записывается в её строку и не прерывает прогон.
    reconstruct_options включает восстановление обеих половин пары.
    """
    if not Q > 0:
        raise InvalidInputError(f"Радиус шара Q должен быть положительным: {Q}")
    if ensemble_size < 1:
        raise InvalidInputError(f"Размер ансамбля должен быть ≥ 1, получено {ensemble_size}")
    if workers < 1:
        raise InvalidInputError(f"Число процессов должно быть ≥ 1, получено {workers}")
    config = config or StarGraphConfig()
    tasks = [
        PairTask(
            index=i,
            seeds=seeds,
            Q=Q,
            N=N,
            edge_count=config.edge_count,
            grid_points=config.grid_points,
            lambda_max=config.lambda_max,
            modes=modes,
            reconstruct_options=reconstruct_options,
        )
        for i, seeds in enumerate(pair_seeds(seed, ensemble_size))
    ]
    report = StabilityReport(Q=Q, N=N, seed=seed)

    def collect(result: PairResult) -> None:
        report.pairs.append(result)
        if result.ok:
            status = f"пара {result.index}: ratio = {result.ratio:.4g}"
        else:
            status = f"пара {result.index}: {result.error}"
            log.warning("pair %d failed: %s", result.index, result.error)
        if progress_callback:
            progress_callback(len(report.pairs), len(tasks), status)

    if workers > 1:
        # imap keeps pair order, so reports do not depend on scheduling
        with Pool(processes=workers) as pool:
            for result in pool.imap(_run_pair, tasks):
                collect(result)
    else:
        for task in tasks:
            collect(_run_pair(task))

    log.info(
        "stability: Q=%g, N=%d, pairs=%d, failures=%d, max ratio=%.4g",
        Q, N, len(report.pairs), report.failures, report.max_ratio,
    )
    return report
