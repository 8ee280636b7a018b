from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline

from star_spectral.errors import InvalidInputError

EDGE_LENGTH = np.pi
MEAN_ZERO_TOL = 1e-10
BALL_TOL = 1e-9
DEFAULT_COSINE_MODES = 8


@dataclass(frozen=True)
class StarGraphConfig:
    edge_count: int = 3
    grid_points: int = 512
    lambda_max: float = 1e4

    def __post_init__(self) -> None:
        if self.edge_count < 2:
            raise InvalidInputError(
                f"Требуется m ≥ 2 рёбер (m = 1 не поддерживается), получено m = {self.edge_count}"
            )
        if self.grid_points < 16:
            raise InvalidInputError(f"Требуется M ≥ 16 узлов сетки, получено M = {self.grid_points}")
        if not self.lambda_max > 0:
            raise InvalidInputError(f"lambda_max должен быть положительным: {self.lambda_max}")

    @property
    def step(self) -> float:
        return EDGE_LENGTH / self.grid_points

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, EDGE_LENGTH, self.grid_points + 1)

    @property
    def effective_lambda_max(self) -> float:
        # the fixed-step integrator loses accuracy beyond (M/10)^2
        return min(self.lambda_max, (self.grid_points / 10.0) ** 2)

    @property
    def max_modes(self) -> int:
        # winding boxes reach |ρ|² = (N + 1/4)² + 1/4
        return int(np.floor(np.sqrt(self.effective_lambda_max - 0.25) - 0.25))


@dataclass(frozen=True, eq=False)
class Potential:
    samples: np.ndarray

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 1 or samples.size < 17:
            raise InvalidInputError("Потенциал задаётся одномерным массивом из M+1 ≥ 17 значений")
        if not np.all(np.isfinite(samples)):
            raise InvalidInputError("Потенциал содержит нечисловые значения (nan/inf)")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def zero(cls, grid_points: int) -> "Potential":
        return cls(np.zeros(grid_points + 1))

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], grid_points: int) -> "Potential":
        x = np.linspace(0.0, EDGE_LENGTH, grid_points + 1)
        return cls(np.broadcast_to(np.asarray(func(x), dtype=float), x.shape))

    @property
    def grid_points(self) -> int:
        return self.samples.size - 1

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, EDGE_LENGTH, self.samples.size)

    @property
    def integral(self) -> float:
        return float(trapezoid(self.samples, self.nodes))

    @property
    def l2_norm(self) -> float:
        return float(np.sqrt(trapezoid(self.samples**2, self.nodes)))

    @property
    def is_mean_zero(self) -> bool:
        return abs(self.integral) <= MEAN_ZERO_TOL * (1.0 + self.l2_norm)

    def spline(self) -> CubicSpline:
        return CubicSpline(self.nodes, self.samples)

    def resample(self, grid_points: int) -> "Potential":
        if grid_points == self.grid_points:
            return self
        x = np.linspace(0.0, EDGE_LENGTH, grid_points + 1)
        return Potential(self.spline()(x))

    def distance(self, other: "Potential") -> float:
        other = other.resample(self.grid_points)
        return float(np.sqrt(trapezoid((self.samples - other.samples) ** 2, self.nodes)))

    def __add__(self, other: "Potential") -> "Potential":
        return Potential(self.samples + other.resample(self.grid_points).samples)

    def scaled(self, factor: float) -> "Potential":
        return Potential(factor * self.samples)


@dataclass(frozen=True, eq=False)
class PotentialVector:
    potentials: tuple[Potential, ...]
    ball_radius: float | None = None
    shifts: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        potentials = tuple(self.potentials)
        object.__setattr__(self, "potentials", potentials)
        if len(potentials) < 2:
            raise InvalidInputError(f"Требуется m ≥ 2 потенциалов, получено {len(potentials)}")
        sizes = {p.grid_points for p in potentials}
        if len(sizes) != 1:
            raise InvalidInputError(f"Потенциалы заданы на разных сетках: M = {sorted(sizes)}")
        if self.ball_radius is not None:
            if not self.ball_radius > 0:
                raise InvalidInputError(f"Радиус шара Q должен быть положительным: {self.ball_radius}")
            if self.total_norm > self.ball_radius + BALL_TOL:
                raise InvalidInputError(
                    f"Σ‖q_j‖ = {self.total_norm:.6g} превышает радиус шара Q = {self.ball_radius:.6g}"
                )

    @classmethod
    def zero(cls, config: StarGraphConfig) -> "PotentialVector":
        return cls(tuple(Potential.zero(config.grid_points) for _ in range(config.edge_count)))

    @classmethod
    def from_functions(
        cls,
        funcs: list[Callable[[np.ndarray], np.ndarray]],
        grid_points: int,
        ball_radius: float | None = None,
    ) -> "PotentialVector":
        return cls(tuple(Potential.from_function(f, grid_points) for f in funcs), ball_radius)

    @property
    def m(self) -> int:
        return len(self.potentials)

    @property
    def grid_points(self) -> int:
        return self.potentials[0].grid_points

    @property
    def norms(self) -> np.ndarray:
        return np.array([p.l2_norm for p in self.potentials])

    @property
    def total_norm(self) -> float:
        return float(self.norms.sum())

    @property
    def is_mean_zero(self) -> bool:
        return all(p.is_mean_zero for p in self.potentials)

    def __getitem__(self, j: int) -> Potential:
        return self.potentials[j]

    def __iter__(self):
        return iter(self.potentials)

    def __len__(self) -> int:
        return len(self.potentials)

    def config(self, lambda_max: float = 1e4) -> StarGraphConfig:
        return StarGraphConfig(self.m, self.grid_points, lambda_max)

    def normalized(self) -> "PotentialVector":
        results = [normalize_mean_zero(p) for p in self.potentials]
        return PotentialVector(
            tuple(p for p, _ in results),
            self.ball_radius,
            tuple(shift for _, shift in results),
        )

    def with_edge(self, j: int, potential: Potential) -> "PotentialVector":
        potentials = list(self.potentials)
        potentials[j] = potential.resample(self.grid_points)
        return PotentialVector(tuple(potentials))

    def resample(self, grid_points: int) -> "PotentialVector":
        return PotentialVector(tuple(p.resample(grid_points) for p in self.potentials), self.ball_radius)

    def distance(self, other: "PotentialVector") -> float:
        if other.m != self.m:
            raise InvalidInputError(f"Разное число рёбер: {self.m} и {other.m}")
        return float(sum(p.distance(o) for p, o in zip(self.potentials, other.potentials)))

    def edge_distances(self, other: "PotentialVector") -> np.ndarray:
        return np.array([p.distance(o) for p, o in zip(self.potentials, other.potentials)])


def normalize_mean_zero(p: Potential) -> tuple[Potential, float]:
    if not np.all(np.isfinite(p.samples)):
        raise InvalidInputError("Потенциал содержит нечисловые значения (nan/inf)")
    shift = p.integral / EDGE_LENGTH
    return Potential(p.samples - shift), shift


def ball_membership(v: PotentialVector, Q: float) -> tuple[bool, float]:
    if not Q > 0:
        raise InvalidInputError(f"Радиус шара Q должен быть положительным: {Q}")
    margin = Q - v.total_norm
    return margin >= 0.0, margin


def random_in_ball(
    config: StarGraphConfig,
    Q: float,
    seed: int,
    modes: int = DEFAULT_COSINE_MODES,
) -> PotentialVector:
    """Случайный вектор потенциалов из шара P_Q.

    Каждое ребро — отрезок косинус-ряда Σ c_l cos(l x), l = 1..modes,
    c_l ~ N(0, 1)/l; затем весь вектор масштабируется к суммарной норме
    Q·U, U ~ U[0, 1). Генератор: numpy PCG64 с заданным зерном.
    """
    if not Q > 0:
        raise InvalidInputError(f"Радиус шара Q должен быть положительным: {Q}")
    rng = np.random.Generator(np.random.PCG64(seed))
    x = config.nodes
    ell = np.arange(1, modes + 1)
    basis = np.cos(np.outer(ell, x))
    coefficients = rng.standard_normal((config.edge_count, modes)) / ell
    raw = [Potential(c @ basis) for c in coefficients]
    total = sum(p.l2_norm for p in raw)
    target = Q * rng.random()
    factor = target / total if total > 0 else 0.0
    # the cosine basis is mean-zero on the grid, projection only strips rounding
    potentials = tuple(normalize_mean_zero(p.scaled(factor))[0] for p in raw)
    vector = PotentialVector(potentials)
    if vector.total_norm > Q:
        vector = PotentialVector(tuple(p.scaled(Q / vector.total_norm) for p in potentials))
    return PotentialVector(vector.potentials, Q)
