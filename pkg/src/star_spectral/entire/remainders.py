import logging

import numpy as np

from star_spectral.errors import InvalidInputError
from star_spectral.models.data import CauchyCoefficients, PWRemainder
from star_spectral.models.graph import PotentialVector, StarGraphConfig
from star_spectral.models.spectrum import AuxSpectrum, Spectrum
from star_spectral.ode.closed_forms import leading_delta, leading_delta_aux, partial_leading
from star_spectral.ode.engine import EdgePropagator, StarSystem
from star_spectral.entire.partial import partial_arrays
from star_spectral.entire.products import delta_from_zeros

log = logging.getLogger(__name__)

DEFAULT_SAMPLES = 801
DEFAULT_ALPHA_SHIFT = 0.5
PARITY_TOL = 1e-8


def _grid(R: float, sample_count: int) -> np.ndarray:
    if sample_count < 3 or sample_count % 2 == 0:
        raise InvalidInputError(f"Число отсчётов должно быть нечётным и ≥ 3, получено {sample_count}")
    return np.linspace(-R, R, sample_count)


def pw_extract(
    source: PotentialVector | tuple[Spectrum, list[AuxSpectrum]],
    R: float | None = None,
    sample_count: int = DEFAULT_SAMPLES,
    partial: bool = False,
    config: StarGraphConfig | None = None,
) -> PWRemainder:
    """Отсчёты F, F_k (и f, f₁, g, g₁ при partial) на [−R, R].

    source — либо потенциалы (Δ через интегратор), либо пара
    (основной спектр, вспомогательные спектры) для Δ по произведениям.
    """
    if isinstance(source, PotentialVector):
        m = source.m
    else:
        m = source[0].m
    R = float(4 * m if R is None else R)
    if R < 2 * m:
        raise InvalidInputError(f"Радиус R должен быть ≥ 2m = {2 * m}, получено {R}")
    rho = _grid(R, sample_count)
    lam = rho * rho

    if isinstance(source, PotentialVector):
        system = StarSystem(source, config)
        delta, aux = system.characteristic(lam)
        aux = aux[:-1]
    else:
        if partial:
            raise InvalidInputError("Частичные функции f, f₁, g, g₁ требуют потенциалов, а не спектров")
        spectrum, aux_spectra = source
        if len(aux_spectra) != m - 1:
            raise InvalidInputError(f"Нужно {m - 1} вспомогательных спектров, получено {len(aux_spectra)}")
        delta = delta_from_zeros(spectrum, lam).real
        aux = np.array([delta_from_zeros(a, lam).real for a in aux_spectra])

    sign_main = (-1) ** m
    values = {"F": rho**m * delta - rho * leading_delta(m, rho).real}
    parity = {"F": sign_main}
    support = {"F": m * np.pi}
    for k, row in enumerate(aux, start=1):
        name = f"F_{k}"
        values[name] = rho ** (m - 1) * row - rho * leading_delta_aux(m, rho).real
        parity[name] = -sign_main
        support[name] = m * np.pi

    if partial:
        parts = partial_arrays(system.potentials.potentials[:-1], lam, system.config.effective_lambda_max)
        lead = partial_leading(m, rho)
        values["f"] = rho**m * parts["delta_pi"] - lead["f"].real
        values["f1"] = rho ** (m - 1) * parts["delta_pi_1"] - lead["f1"].real
        values["g"] = rho ** (m - 1) * parts["delta_k"] - lead["g"].real
        values["g1"] = rho ** (m - 2) * parts["delta_k_1"] - lead["g1"].real
        parity.update({"f": sign_main, "f1": -sign_main, "g": -sign_main, "g1": sign_main})
        support.update({name: (m - 1) * np.pi for name in ("f", "f1", "g", "g1")})

    result = PWRemainder(rho=rho, values=values, support=support, parity=parity)
    for name in values:
        defect = result.parity_defect(name)
        if defect > PARITY_TOL * max(1.0, float(np.max(np.abs(values[name])))):
            log.warning("%s: parity defect %.3g", name, defect)
    return result


def cauchy_from_boundary(alpha_shift: float, n: np.ndarray, s: np.ndarray, sp: np.ndarray) -> CauchyCoefficients:
    """k̂_n = μ_n S(π, μ_n) − ν_n sin ν_nπ, ĥ_n = ν_n(S′(π, μ_n) − cos ν_nπ)."""
    nu = n + 1j * alpha_shift
    mu = nu * nu
    k_hat = mu * s - nu * np.sin(nu * np.pi)
    h_hat = nu * (sp - np.cos(nu * np.pi))
    return CauchyCoefficients(alpha_shift=alpha_shift, n=n, nu=nu, k_hat=k_hat, h_hat=h_hat)


def cauchy_coeffs(
    v: PotentialVector,
    alpha_shift: float = DEFAULT_ALPHA_SHIFT,
    N: int = 30,
    config: StarGraphConfig | None = None,
) -> CauchyCoefficients:
    """Коэффициенты Рисса данных Коши ребра m в узлах ν_n = n + iα, n ∈ [−N, N]."""
    if not 0 < alpha_shift <= 2:
        raise InvalidInputError(f"Сдвиг α должен лежать в (0, 2], получено {alpha_shift}")
    if N < 1:
        raise InvalidInputError(f"N должно быть ≥ 1, получено {N}")
    config = config or v.config()
    n = np.arange(-N, N + 1).astype(float)
    nu = n + 1j * alpha_shift
    edge = v[v.m - 1].resample(config.grid_points)
    fs = EdgePropagator(edge, config.effective_lambda_max).propagate(nu * nu)
    coefficients = cauchy_from_boundary(alpha_shift, n, fs.s, fs.sp)
    if coefficients.symmetry_defect > 1e-8 * max(1.0, coefficients.k_norm, coefficients.h_norm):
        log.warning("Cauchy coefficients: symmetry defect %.3g", coefficients.symmetry_defect)
    return coefficients
