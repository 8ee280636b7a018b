import logging
import warnings

import numpy as np
from scipy.integrate import simpson

from star_spectral.errors import InvalidInputError, NumericalFailureError, OutOfRangeError, PoleProximityError
from star_spectral.models.data import AsymptoticReport, ClusterSplit, SpectralDataIP2, WeightMatrix, WeylSample
from star_spectral.models.graph import PotentialVector, StarGraphConfig
from star_spectral.models.spectrum import AuxSpectrum, IndexedSpectrum, Spectrum, assign_clusters, build_spectrum
from star_spectral.ode.engine import StarSystem
from star_spectral.spectral.characteristic import AuxCharacteristic, MainCharacteristic
from star_spectral.spectral.roots import assign_indices, locate_zeros

log = logging.getLogger(__name__)

POLE_EPS = 1e-6
CONTOUR_POINTS = 64
CONTOUR_GAP_FRACTION = 0.4
DIFF_STEP = 1e-5
DIFF_GAP_FRACTION = 0.1
RESIDUE_NEG_TOL = 1e-8
RESIDUE_AGREEMENT = 1e-6
ROUNDING_SCALE = 1e-8


def _system(v: PotentialVector, config: StarGraphConfig | None) -> StarSystem:
    return StarSystem(v, config or v.config())


def _check_request(v: PotentialVector, N: int, config: StarGraphConfig) -> None:
    if not v.is_mean_zero:
        raise InvalidInputError("Потенциалы должны иметь нулевое среднее на каждом ребре")
    if N < 1:
        raise InvalidInputError(f"Число оболочек N должно быть ≥ 1, получено {N}")
    if N > config.max_modes:
        raise OutOfRangeError(
            f"N = {N} превышает допустимое N_max = {config.max_modes} "
            f"для M = {config.grid_points}, Λ_max = {config.effective_lambda_max:.6g}",
            limit=config.effective_lambda_max,
        )


def _indexed(func, N: int, j: int | None) -> IndexedSpectrum:
    shells = locate_zeros(func, N)
    rows = [assign_indices(shell.expanded(), func.asymptotes(shell.n)) for shell in shells]
    return build_spectrum(func.m, N, np.array(rows), func.branches(), j=j)


def locate_spectrum(v: PotentialVector, N: int, config: StarGraphConfig | None = None) -> Spectrum:
    system = _system(v, config)
    _check_request(v, N, system.config)
    spectrum = _indexed(MainCharacteristic(system), N, None)
    log.info("main spectrum: N=%d, m=%d, negative=%s", N, v.m, spectrum.has_negative)
    return spectrum


def locate_aux_spectrum(v: PotentialVector, N: int, j: int, config: StarGraphConfig | None = None) -> AuxSpectrum:
    system = _system(v, config)
    _check_request(v, N, system.config)
    return _indexed(AuxCharacteristic(system, j), N, j)


def locate_aux_spectra(v: PotentialVector, N: int, config: StarGraphConfig | None = None) -> list[AuxSpectrum]:
    system = _system(v, config)
    _check_request(v, N, system.config)
    return [_indexed(AuxCharacteristic(system, j), N, j) for j in range(1, v.m)]


def weyl_values(
    v: PotentialVector,
    lambda_grid,
    config: StarGraphConfig | None = None,
    spectrum: Spectrum | None = None,
) -> WeylSample:
    """M_j(λ) = −Δ_j(λ)/Δ(λ), j = 1..m, на сетке вне спектра."""
    system = _system(v, config)
    lam = np.atleast_1d(np.asarray(lambda_grid, dtype=float))
    if spectrum is None:
        top = max(float(lam.max()), 0.0)
        N = min(max(1, int(np.ceil(np.sqrt(top) + 0.75))), system.config.max_modes)
        spectrum = locate_spectrum(v, N, system.config)
    eigen = spectrum.lambdas.ravel()
    distance = np.abs(lam[:, None] - eigen[None, :])
    near = np.argwhere(distance < POLE_EPS)
    if near.size:
        i, e = near[0]
        raise PoleProximityError(
            f"Точка λ = {lam[i]:.12g} ближе {POLE_EPS:g} к собственному значению {eigen[e]:.12g}",
            lam=complex(lam[i]),
            eigenvalue=float(eigen[e]),
        )
    delta, aux = system.characteristic(lam)
    values = -aux / delta[None, :]
    residual = np.abs(values * delta[None, :] + aux) / np.maximum(np.abs(aux), np.finfo(float).tiny)
    return WeylSample(lambdas=lam, values=values, residual=float(residual.max(initial=0.0)))


def _split(
    alpha: float,
    indices: list[tuple[int, int]],
    reference_betas: np.ndarray | None,
) -> tuple[np.ndarray, str]:
    """Разбиение α на r неотрицательных частей; с эталоном — ближайшее в l₁."""
    r = len(indices)
    equal = np.full(r, alpha / r)
    if reference_betas is None:
        return equal, "equal"
    split = np.clip(reference_betas, 0.0, None).astype(float)
    excess = alpha - split.sum()
    if excess >= 0:
        split[int(np.argmax(split)) if split.any() else 0] += excess
    else:
        for i in np.argsort(-split):
            take = min(split[i], -excess)
            split[i] -= take
            excess += take
            if excess >= 0:
                break
    return split, "greedy"


def _cluster_cost(betas: np.ndarray, reference: SpectralDataIP2, indices, rho_now: np.ndarray) -> float:
    """Вклад кластера в δ̃² при данном разбиении (по всем j сразу)."""
    total = 0.0
    for (n, k), row in zip(indices, betas):
        rho_ref = np.sqrt(complex(reference.lambdas[n - 1, k - 1]))
        d = abs(rho_now[n - 1, k - 1] - rho_ref) + np.sum(np.abs(row - reference.betas[n - 1, k - 1])) / n**2
        total += (n * d) ** 2
    return total


def cluster_contours(spectrum: IndexedSpectrum) -> tuple[list, np.ndarray, np.ndarray]:
    """Кластеры, их центры и радиусы контуров.

    Радиус — доля CONTOUR_GAP_FRACTION зазора до ближайшего другого кластера,
    без нижнего пола: окружность не должна захватывать соседний полюс даже при
    зазорах порядка 1e-5.
    """
    clusters = spectrum.clusters()
    centers = np.array([np.mean([e.lam for e in c]) for c in clusters])
    return clusters, centers, CONTOUR_GAP_FRACTION * _center_gaps(centers)


def _center_gaps(centers: np.ndarray) -> np.ndarray:
    gaps = np.full(centers.size, np.inf)
    if centers.size > 1:
        order = np.argsort(centers)
        diffs = np.diff(centers[order])
        gaps[order[:-1]] = np.minimum(gaps[order[:-1]], diffs)
        gaps[order[1:]] = np.minimum(gaps[order[1:]], diffs)
    return np.where(np.isfinite(gaps), gaps, 1.0)


def contour_residues(evaluate, centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """(1/2πi)∮ Δ_j/Δ dλ по окружностям; evaluate(λ) → (Δ формы (L,), Δ_j формы (J, L)).

    Множитель λ − c берётся по фактически вычисленным узлам: при |c| ≫ r
    округление c + r·e^{iθ} иначе даёт относительную ошибку порядка ε|c|/r.
    """
    theta = 2 * np.pi * np.arange(CONTOUR_POINTS) / CONTOUR_POINTS
    points = centers[:, None] + radii[:, None] * np.exp(1j * theta)[None, :]
    offsets = points - centers[:, None]
    delta, aux = evaluate(points.ravel())
    ratio = aux.reshape(aux.shape[0], *points.shape) / delta.reshape(points.shape)[None]
    return np.real(np.mean(ratio * offsets[None], axis=2)).T


def distribute_weights(
    spectrum: IndexedSpectrum,
    clusters: list,
    centers: np.ndarray,
    residues: np.ndarray,
    reference: SpectralDataIP2 | None = None,
) -> WeightMatrix:
    """α по индексам и β после разбиения вычетов кратных кластеров."""
    m, N = spectrum.m, spectrum.N
    alpha = np.zeros((N, m, m))
    beta = np.zeros((N, m, m))
    splits = []
    rho_now = spectrum.rhos.astype(complex)
    for c, cluster in enumerate(clusters):
        indices = [(e.n, e.k) for e in cluster]
        for n, k in indices:
            alpha[n - 1, k - 1] = residues[c]
        if len(cluster) == 1:
            n, k = indices[0]
            beta[n - 1, k - 1] = residues[c]
            continue
        rows_equal = np.empty((len(indices), m))
        rows_greedy = np.empty((len(indices), m))
        for j in range(m):
            ref = None if reference is None else np.array([reference.betas[n - 1, k - 1, j] for n, k in indices])
            rows_equal[:, j], _ = _split(residues[c, j], indices, None)
            rows_greedy[:, j], _ = _split(residues[c, j], indices, ref)
        rows, method = rows_equal, "equal"
        if reference is not None and _cluster_cost(rows_greedy, reference, indices, rho_now) < _cluster_cost(
            rows_equal, reference, indices, rho_now
        ):
            rows, method = rows_greedy, "greedy"
        for (n, k), row in zip(indices, rows):
            beta[n - 1, k - 1] = row
        for j in range(m):
            splits.append(
                ClusterSplit(
                    j=j + 1,
                    lam=float(centers[c]),
                    indices=tuple(indices),
                    residue=float(residues[c, j]),
                    betas=tuple(float(b) for b in rows[:, j]),
                    method=method,
                )
            )
    kappa0, kappa1 = weight_remainders(beta)
    return WeightMatrix(alpha=alpha, beta=beta, splits=tuple(splits), kappa0=kappa0, kappa1=kappa1)


def weight_numbers(
    v: PotentialVector,
    spectrum: Spectrum,
    config: StarGraphConfig | None = None,
    reference: SpectralDataIP2 | None = None,
) -> WeightMatrix:
    """α_nkj = −Res M_j и их разбиение β по кластерам кратных собственных значений.

    Простые полюса: Δ_j(λ₀)/Δ′(λ₀) с центральной разностью, сверка с контуром.
    Шаг разности не превышает DIFF_GAP_FRACTION зазора до соседнего полюса.
    Если оценки расходятся, берётся контурная. Кластеры: только контурный
    интеграл по окружности вокруг всего кластера.
    """
    system = _system(v, config)
    clusters, centers, radii = cluster_contours(spectrum)
    sizes = np.array([len(c) for c in clusters])
    contour = contour_residues(system.characteristic, centers, radii)

    residues = contour.copy()
    simple = np.flatnonzero(sizes == 1)
    if simple.size:
        lam0 = centers[simple]
        gaps = radii[simple] / CONTOUR_GAP_FRACTION
        h = np.minimum(DIFF_STEP * np.maximum(1.0, np.abs(lam0)), DIFF_GAP_FRACTION * gaps)
        delta, aux = system.characteristic(np.concatenate([lam0, lam0 + h, lam0 - h]))
        L = lam0.size
        derivative = (delta[L : 2 * L] - delta[2 * L :]) / (2 * h)
        direct = np.real(aux[:, :L] / derivative[None, :]).T
        mismatch = np.abs(direct - contour[simple])
        # близкие пары теряют точность пропорционально |λ|/зазор
        scale = np.maximum(1.0, ROUNDING_SCALE * np.abs(lam0) / gaps)[:, None]
        disagree = np.any(mismatch > RESIDUE_AGREEMENT * np.maximum(1.0, np.abs(direct)) * scale, axis=1)
        if disagree.any():
            worst = int(np.argmax(np.where(disagree, mismatch.max(axis=1), -1.0)))
            warnings.warn(
                f"Вычет при λ = {lam0[worst]:.12g}: разностная и контурная оценки расходятся "
                f"на {mismatch[worst].max():.3g} ({int(disagree.sum())} полюсов); взят контурный интеграл",
                stacklevel=2,
            )
        residues[simple[~disagree]] = direct[~disagree]

    if np.any(residues < -RESIDUE_NEG_TOL):
        c, j = np.argwhere(residues < -RESIDUE_NEG_TOL)[0]
        raise NumericalFailureError(
            f"Отрицательный вес α = {residues[c, j]:.3g} при λ = {centers[c]:.12g}, j = {j + 1}"
        )
    residues = np.clip(residues, 0.0, None)
    return distribute_weights(spectrum, clusters, centers, residues, reference)


def weight_remainders(beta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """ϰ⁰_nj и ϰ¹_nj формы (N, m) из асимптотик сумм весов."""
    N, m, _ = beta.shape
    n = np.arange(1, N + 1)[:, None]
    sine_sum = beta[:, : m - 1, :].sum(axis=1)
    kappa0 = n * (m * np.pi / (2 * n**2) * sine_sum - (m - 1))
    kappa1 = n * (m * np.pi * beta[:, m - 1, :] / (n - 0.5) ** 2 - 2)
    return kappa0, kappa1


def _report(name: str, remainders: np.ndarray) -> AsymptoticReport:
    per_n = np.sum(np.abs(remainders.reshape(remainders.shape[0], -1)) ** 2, axis=1)
    return AsymptoticReport(name=name, remainders=remainders, cumulative=np.cumsum(per_n))


def asymptotic_report(data: IndexedSpectrum | WeightMatrix) -> list[AsymptoticReport]:
    if isinstance(data, AuxSpectrum):
        return [_report(f"xi_{data.j}", data.remainders)]
    if isinstance(data, IndexedSpectrum):
        return [_report("kappa", data.remainders)]
    if isinstance(data, WeightMatrix):
        kappa0, kappa1 = (data.kappa0, data.kappa1) if data.kappa0 is not None else weight_remainders(data.beta)
        return [_report("kappa0", kappa0), _report("kappa1", kappa1)]
    raise InvalidInputError(f"Нет асимптотик для объекта типа {type(data).__name__}")


def edge_norms(system: StarSystem, lambdas: np.ndarray) -> np.ndarray:
    """‖S_j(·, λ)‖²_{L₂(0,π)} формы (m, L)."""
    lambdas = np.asarray(lambdas, dtype=float)
    x = system.potentials[0].nodes
    norms = []
    for fs in system.fundamentals(lambdas, trace=True):
        norms.append(simpson(fs.s_trace**2, x=x, axis=0))
    return np.array(norms)


def weight_sum_rule(
    v: PotentialVector,
    spectrum: Spectrum,
    weights: WeightMatrix,
    config: StarGraphConfig | None = None,
) -> np.ndarray:
    """Σ_j α_j ‖S_j(·, λ)‖² по кластерам; для кластера кратности r равно r."""
    system = _system(v, config)
    clusters = spectrum.clusters()
    centers = np.array([np.mean([e.lam for e in c]) for c in clusters])
    norms = edge_norms(system, centers)
    sums = []
    for c, cluster in enumerate(clusters):
        e = cluster[0]
        sums.append(float(np.dot(weights.alpha[e.n - 1, e.k - 1], norms[:, c])))
    return np.array(sums)


def fill_last_vertex(
    lambdas: np.ndarray,
    betas: np.ndarray,
    norms: np.ndarray,
    known: int,
) -> np.ndarray:
    """Восполняет столбцы j > known правилом сумм Σ_j α_j ‖S_j‖² = r.

    norms формы (m, N, m) — ‖S_j(·, λ_nk)‖²; недостающая масса делится
    поровну между неизвестными вершинами.
    """
    N, m = lambdas.shape
    betas = betas.copy()
    clusters: dict[int, list[tuple[int, int]]] = {}
    labels = assign_clusters(list(lambdas.ravel()))
    for idx, label in enumerate(labels):
        clusters.setdefault(label, []).append(divmod(idx, m))
    clamped = 0
    for members in clusters.values():
        r = len(members)
        known_mass = sum(float(np.dot(betas[n, k, :known], norms[:known, n, k])) for n, k in members)
        missing = m - known
        for n, k in members:
            share = (1.0 - known_mass / r) / missing
            for j in range(known, m):
                value = share / norms[j, n, k]
                if value < 0:
                    clamped += 1
                    value = 0.0
                betas[n, k, j] = value
    if clamped:
        warnings.warn(f"Правило сумм дало {clamped} отрицательных весов; они обнулены", stacklevel=2)
    return betas


def spectral_data(spectrum: Spectrum, weights: WeightMatrix) -> SpectralDataIP2:
    return SpectralDataIP2(spectrum.lambdas, weights.beta)


def forward_ip2(
    v: PotentialVector,
    N: int,
    config: StarGraphConfig | None = None,
    reference: SpectralDataIP2 | None = None,
) -> tuple[Spectrum, WeightMatrix]:
    spectrum = locate_spectrum(v, N, config)
    return spectrum, weight_numbers(v, spectrum, config, reference)
