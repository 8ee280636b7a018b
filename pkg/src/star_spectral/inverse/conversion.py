import logging

import numpy as np

from star_spectral.entire.products import delta_from_zeros
from star_spectral.errors import ConversionError
from star_spectral.inverse.reconstruct import ReconstructOptions, reconstruct
from star_spectral.models.data import SpectralDataIP1, SpectralDataIP2
from star_spectral.models.graph import StarGraphConfig
from star_spectral.models.spectrum import IndexedSpectrum, aux_branches, build_spectrum, main_branches
from star_spectral.ode.closed_forms import rho_of
from star_spectral.spectral.forward import (
    RESIDUE_NEG_TOL,
    cluster_contours,
    contour_residues,
    distribute_weights,
    fill_last_vertex,
    forward_ip2,
)

log = logging.getLogger(__name__)


def ip1_spectra(data: SpectralDataIP1) -> tuple[IndexedSpectrum, list[IndexedSpectrum]]:
    m, N = data.m, data.N
    main = build_spectrum(m, N, data.main, main_branches(m))
    aux = [build_spectrum(m, N, data.aux[j - 1], aux_branches(m), j=j) for j in range(1, m)]
    return main, aux


def zero_potential_norms(lam) -> np.ndarray:
    """‖sin ρx/ρ‖²_{L₂(0,π)} = (π/2 − sin 2ρπ/(4ρ))/ρ², с пределом π³/3 при ρ → 0."""
    rho = rho_of(np.asarray(lam, dtype=float))
    small = np.abs(rho) < 1e-4
    safe = np.where(small, 1.0, rho)
    exact = (np.pi / 2 - np.sin(2 * safe * np.pi) / (4 * safe)) / safe**2
    return np.real(np.where(small, np.pi**3 / 3, exact))


def known_columns(data: SpectralDataIP1) -> SpectralDataIP2:
    """Веса j = 1..m−1 по вычетам произведений; столбец m — по нормам q ≡ 0.

    Результат неполон (known_vertices = m − 1): столбец m здесь лишь
    начальное приближение для правила сумм.
    """
    main, aux = ip1_spectra(data)
    m = data.m

    def evaluate(lam):
        delta = delta_from_zeros(main, lam)
        return delta, np.array([delta_from_zeros(a, lam) for a in aux])

    clusters, centers, radii = cluster_contours(main)
    residues = contour_residues(evaluate, centers, radii)
    if np.any(residues < -RESIDUE_NEG_TOL):
        c, j = np.argwhere(residues < -RESIDUE_NEG_TOL)[0]
        raise ConversionError(
            f"Отрицательный вес α = {residues[c, j]:.3g} при λ = {centers[c]:.12g}, j = {j + 1}: "
            "спектры несогласованы или зашумлены"
        )
    residues = np.clip(residues, 0.0, None)
    full = np.concatenate([residues, np.zeros((residues.shape[0], 1))], axis=1)
    weights = distribute_weights(main, clusters, centers, full)
    norms = np.broadcast_to(zero_potential_norms(data.main)[None], (m, data.N, m))
    betas = fill_last_vertex(data.main, weights.beta, norms, m - 1)
    log.info("ip1 -> ip2: N=%d, m=%d, clusters=%d", data.N, m, len(clusters))
    return SpectralDataIP2(data.main, betas, known_vertices=m - 1)


def ip1_to_ip2(
    data: SpectralDataIP1,
    options: ReconstructOptions | None = None,
    refine: bool = True,
) -> SpectralDataIP2:
    """Веса из m спектров: Δ и Δ_j строятся по нулям, α = −Res(−Δ_j/Δ).

    Остатки Вейля дают столбцы j = 1..m−1. Столбец m задаётся правилом
    сумм Σ_j α_j‖S_j‖² = r, где нормы зависят от неизвестного потенциала:
    при refine потенциал восстанавливается по неполным данным, и столбец m
    берётся из прямой задачи для него. refine=False возвращает неполные
    данные с нормами q ≡ 0.
    """
    partial = known_columns(data)
    if not refine:
        return partial
    options = options or ReconstructOptions()
    result = reconstruct(partial, options)
    config = StarGraphConfig(data.m, options.grid_points)
    _, weights = forward_ip2(result.potentials, data.N, config, reference=partial)
    betas = partial.betas.copy()
    betas[:, :, data.m - 1] = weights.beta[:, :, data.m - 1]
    log.info(
        "ip1 -> ip2: vertex %d refined in %d iterations (converged=%s)",
        data.m,
        result.iterations,
        result.converged,
    )
    return SpectralDataIP2(data.main, betas)
