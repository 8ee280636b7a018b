import logging
from dataclasses import dataclass

import numpy as np

from star_spectral.errors import OutOfRangeError
from star_spectral.models.graph import Potential, PotentialVector, StarGraphConfig
from star_spectral.ode.closed_forms import rho_of

log = logging.getLogger(__name__)

_GAUSS_OFFSET = np.sqrt(3.0) / 6.0
_SERIES_CUTOFF = 1e-6


@dataclass
class FundamentalSystem:
    """S, S′, C, C′ при x = π для массива λ; трассы на сетке (M+1, L) по запросу."""

    lam: np.ndarray
    s: np.ndarray
    sp: np.ndarray
    c: np.ndarray
    cp: np.ndarray
    s_trace: np.ndarray | None = None
    sp_trace: np.ndarray | None = None
    c_trace: np.ndarray | None = None
    cp_trace: np.ndarray | None = None

    @property
    def wronskian(self) -> np.ndarray:
        return self.c * self.sp - self.cp * self.s


@dataclass(frozen=True)
class EdgeBasisValues:
    lam: complex
    rho: complex
    S_end: complex
    Sp_end: complex
    C_end: complex
    Cp_end: complex
    traces: FundamentalSystem | None = None

    @property
    def wronskian(self) -> complex:
        return self.C_end * self.Sp_end - self.Cp_end * self.S_end


@dataclass(frozen=True)
class CharValues:
    lam: complex
    rho: complex
    delta: complex
    delta_j: np.ndarray

    @property
    def delta_aux(self) -> np.ndarray:
        """Δ_j для j = 1..m−1 (вспомогательные спектры Λ_j)."""
        return self.delta_j[:-1]


def _cosh_and_sinhc(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """cosh(√z) и sinh(√z)/√z — чётные функции, ветвь корня не важна."""
    small = np.abs(z) < _SERIES_CUTOFF
    if np.iscomplexobj(z):
        root = np.sqrt(np.where(small, 1.0, z))
        ch = np.cosh(root)
        shc = np.sinh(root) / root
    else:
        root = np.sqrt(np.abs(np.where(small, 1.0, z)))
        positive = z >= 0
        ch = np.where(positive, np.cosh(root), np.cos(root))
        shc = np.where(positive, np.sinh(root), np.sin(root)) / root
    ch = np.where(small, 1.0 + z / 2.0 + z * z / 24.0 + z**3 / 720.0, ch)
    shc = np.where(small, 1.0 + z / 6.0 + z * z / 120.0, shc)
    return ch, shc


class EdgePropagator:
    """Магнусов интегратор 4-го порядка для −y″ + q y = λ y на [0, π].

    На каждом шаге экспонента бесследовой матрицы 2×2 берётся точно,
    поэтому постоянный потенциал интегрируется без ошибки метода,
    а вронскиан сохраняется с точностью округления.
    """

    def __init__(self, potential: Potential, lambda_limit: float = np.inf) -> None:
        self.potential = potential
        self.lambda_limit = lambda_limit
        nodes = potential.nodes
        self.h = nodes[1] - nodes[0]
        spline = potential.spline()
        left = nodes[:-1]
        q1 = spline(left + self.h * (0.5 - _GAUSS_OFFSET))
        q2 = spline(left + self.h * (0.5 + _GAUSS_OFFSET))
        self._q_mean = 0.5 * (q1 + q2)
        self._d = np.sqrt(3.0) / 12.0 * self.h**2 * (q1 - q2)

    def _check_range(self, lam: np.ndarray) -> None:
        if lam.size and np.max(np.abs(lam)) > self.lambda_limit:
            worst = lam.flat[int(np.argmax(np.abs(lam)))]
            raise OutOfRangeError(
                f"|λ| = {abs(worst):.6g} превышает допустимый предел {self.lambda_limit:.6g} "
                "для выбранной сетки",
                lam=complex(worst),
                limit=self.lambda_limit,
            )

    def propagate(self, lam, trace: bool = False) -> FundamentalSystem:
        lam = np.atleast_1d(np.asarray(lam))
        if not np.iscomplexobj(lam):
            lam = lam.astype(float)
        self._check_range(lam)
        h = self.h
        p00 = np.ones_like(lam)
        p01 = np.zeros_like(lam)
        p10 = np.zeros_like(lam)
        p11 = np.ones_like(lam)
        steps = self._d.size
        if trace:
            traces = np.empty((4, steps + 1) + lam.shape, dtype=lam.dtype)
            traces[:, 0] = (p01, p11, p00, p10)
        for i in range(steps):
            d = self._d[i]
            kappa = self._q_mean[i] - lam
            ch, shc = _cosh_and_sinhc(d * d + h * h * kappa)
            e00 = ch + shc * d
            e01 = shc * h
            e10 = shc * h * kappa
            e11 = ch - shc * d
            p00, p10 = e00 * p00 + e01 * p10, e10 * p00 + e11 * p10
            p01, p11 = e00 * p01 + e01 * p11, e10 * p01 + e11 * p11
            if trace:
                traces[:, i + 1] = (p01, p11, p00, p10)
        result = FundamentalSystem(lam=lam, s=p01, sp=p11, c=p00, cp=p10)
        if trace:
            result.s_trace, result.sp_trace, result.c_trace, result.cp_trace = traces
        return result


def _product_except(values: np.ndarray, skip: tuple[int, ...]) -> np.ndarray:
    keep = [i for i in range(values.shape[0]) if i not in skip]
    if not keep:
        return np.ones(values.shape[1:], dtype=values.dtype)
    return np.prod(values[keep], axis=0)


def assemble_delta(s: np.ndarray, sp: np.ndarray) -> np.ndarray:
    """Δ = Σ_k S′_k Π_{j≠k} S_j по строкам рёбер."""
    return sum(sp[k] * _product_except(s, (k,)) for k in range(s.shape[0]))


def assemble_delta_aux(s: np.ndarray, sp: np.ndarray, c: np.ndarray, cp: np.ndarray, j: int) -> np.ndarray:
    """Δ_j = C′_j Π_{n≠j} S_n + C_j Σ_{i≠j} S′_i Π_{n≠i,j} S_n."""
    m = s.shape[0]
    total = cp[j] * _product_except(s, (j,))
    for i in range(m):
        if i != j:
            total = total + c[j] * sp[i] * _product_except(s, (i, j))
    return total


class StarSystem:
    """Набор пропагаторов по рёбрам звезды и сборка характеристических функций."""

    def __init__(self, potentials: PotentialVector, config: StarGraphConfig | None = None) -> None:
        self.potentials = potentials
        self.config = config or potentials.config()
        if self.config.grid_points != potentials.grid_points:
            potentials = potentials.resample(self.config.grid_points)
            self.potentials = potentials
        limit = self.config.effective_lambda_max
        self.edges = [EdgePropagator(p, limit) for p in potentials]

    @property
    def m(self) -> int:
        return self.potentials.m

    def fundamentals(self, lam, trace: bool = False) -> list[FundamentalSystem]:
        return [edge.propagate(lam, trace) for edge in self.edges]

    def boundary_arrays(self, lam) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        systems = self.fundamentals(lam)
        return (
            np.array([f.s for f in systems]),
            np.array([f.sp for f in systems]),
            np.array([f.c for f in systems]),
            np.array([f.cp for f in systems]),
        )

    def characteristic(self, lam) -> tuple[np.ndarray, np.ndarray]:
        """Δ(λ) формы (L,) и Δ_j(λ), j = 1..m, формы (m, L)."""
        s, sp, c, cp = self.boundary_arrays(lam)
        delta = assemble_delta(s, sp)
        aux = np.array([assemble_delta_aux(s, sp, c, cp, j) for j in range(self.m)])
        return delta, aux

    def delta(self, lam) -> np.ndarray:
        s, sp, _, _ = self.boundary_arrays(lam)
        return assemble_delta(s, sp)

    def delta_aux(self, lam, j: int) -> np.ndarray:
        s, sp, c, cp = self.boundary_arrays(lam)
        return assemble_delta_aux(s, sp, c, cp, j)

    def scaled_main(self, rho) -> np.ndarray:
        rho = np.asarray(rho)
        return rho ** (self.m - 1) * self.delta(rho * rho)

    def scaled_aux(self, rho, j: int) -> np.ndarray:
        rho = np.asarray(rho)
        return rho ** (self.m - 2) * self.delta_aux(rho * rho, j)


def edge_basis(
    q: Potential,
    lam: complex,
    config: StarGraphConfig | None = None,
    trace: bool = False,
) -> EdgeBasisValues:
    limit = config.effective_lambda_max if config else StarGraphConfig(2, q.grid_points).effective_lambda_max
    fs = EdgePropagator(q, limit).propagate(np.array([lam]), trace=trace)
    return EdgeBasisValues(
        lam=complex(lam),
        rho=complex(rho_of(lam)),
        S_end=complex(fs.s[0]),
        Sp_end=complex(fs.sp[0]),
        C_end=complex(fs.c[0]),
        Cp_end=complex(fs.cp[0]),
        traces=fs if trace else None,
    )


def char_delta(v: PotentialVector, lam: complex, config: StarGraphConfig | None = None) -> CharValues:
    delta, aux = StarSystem(v, config).characteristic(np.array([lam]))
    return CharValues(lam=complex(lam), rho=complex(rho_of(lam)), delta=complex(delta[0]), delta_j=aux[:, 0])


def scaled_char(
    v: PotentialVector,
    rho_real: float,
    config: StarGraphConfig | None = None,
) -> tuple[float, np.ndarray]:
    """(ρ^{m−1}Δ(ρ²), [ρ^{m−2}Δ_k(ρ²)]_{k=1..m−1}) для вещественного ρ."""
    system = StarSystem(v, config)
    rho = np.array([float(rho_real)])
    delta, aux = system.characteristic(rho * rho)
    m = system.m
    return float(rho[0] ** (m - 1) * delta[0]), rho[0] ** (m - 2) * aux[:-1, 0]
