import numpy as np

from star_spectral.errors import InvalidInputError
from star_spectral.models.data import SpectralDataIP1, SpectralDataIP2, StabilityMetrics


def _rho(lambdas: np.ndarray) -> np.ndarray:
    return np.sqrt(np.asarray(lambdas, dtype=complex))


def _check_shapes(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape != b.shape:
        raise InvalidInputError(f"{what}: формы данных не совпадают ({a.shape} и {b.shape})")


def ip2_terms(first: SpectralDataIP2, second: SpectralDataIP2) -> np.ndarray:
    """δ_nk = |ρ⁽¹⁾ − ρ⁽²⁾| + n⁻² Σ_j |β⁽¹⁾ − β⁽²⁾|, форма (N, m)."""
    _check_shapes(first.lambdas, second.lambdas, "λ_nk")
    _check_shapes(first.betas, second.betas, "β_nkj")
    n = np.arange(1, first.N + 1)[:, None]
    rho_diff = np.abs(_rho(first.lambdas) - _rho(second.lambdas))
    beta_diff = np.sum(np.abs(first.betas - second.betas), axis=2)
    return rho_diff + beta_diff / n**2


def _ip1_per_n(first: SpectralDataIP1, second: SpectralDataIP1) -> np.ndarray:
    _check_shapes(first.main, second.main, "Λ")
    _check_shapes(first.aux, second.aux, "Λ_j")
    n = np.arange(1, first.N + 1)
    main = np.sum(np.abs(n[:, None] * (_rho(first.main) - _rho(second.main))) ** 2, axis=1)
    aux = np.sum(np.abs(n[None, :, None] * (_rho(first.aux) - _rho(second.aux))) ** 2, axis=(0, 2))
    return main + aux


def metrics(
    first: SpectralDataIP2 | SpectralDataIP1,
    second: SpectralDataIP2 | SpectralDataIP1,
) -> StabilityMetrics:
    """δ по спектрам и δ̃ по собственным значениям и весам.

    Для пары данных вида ip2 δ учитывает только основной спектр; для пары
    ip1 в δ̃ нет весовых слагаемых.
    """
    if type(first) is not type(second):
        raise InvalidInputError("Сравниваются данные разного вида")
    if first.N != second.N or first.m != second.m:
        raise InvalidInputError(f"Разные N или m: ({first.N}, {first.m}) и ({second.N}, {second.m})")
    n = np.arange(1, first.N + 1)
    if isinstance(first, SpectralDataIP2):
        terms = ip2_terms(first, second)
        rho_only = np.abs(_rho(first.lambdas) - _rho(second.lambdas))
        per_n = np.sum((n[:, None] * rho_only) ** 2, axis=1)
    else:
        per_n = _ip1_per_n(first, second)
        terms = np.abs(_rho(first.main) - _rho(second.main))
    per_n_tilde = np.sum((n[:, None] * terms) ** 2, axis=1)
    return StabilityMetrics(
        delta=float(np.sqrt(per_n.sum())),
        delta_tilde=float(np.sqrt(per_n_tilde.sum())),
        per_n=tuple(float(x) for x in per_n),
        per_n_tilde=tuple(float(x) for x in per_n_tilde),
        N=first.N,
    )


def ip1_metrics(
    main1: SpectralDataIP2,
    main2: SpectralDataIP2,
    spectra1: SpectralDataIP1,
    spectra2: SpectralDataIP1,
) -> StabilityMetrics:
    """δ по m спектрам и δ̃ по данным (λ, β) одной и той же пары."""
    tilde = metrics(main1, main2)
    delta = metrics(spectra1, spectra2)
    return StabilityMetrics(
        delta=delta.delta,
        delta_tilde=tilde.delta_tilde,
        per_n=delta.per_n,
        per_n_tilde=tilde.per_n_tilde,
        N=tilde.N,
    )
