"""Конечно-разностный оракул собственных значений звезды.

Неизвестные: внутренние узлы каждого ребра (x = h..π−h) и общее значение в
центре. Строка центра получается интегрированием уравнения по полуячейкам
[π − h/2, π] всех рёбер с учётом Σ y′_j(π) = 0, поэтому матрица
симметрична после масштабирования B^{-1/2}.

Это конечно-объёмная форма условия Кирхгофа, а не трёхточечная
односторонняя производная; собственные значения сходятся со вторым
порядком по h.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh

from star_spectral.errors import InvalidInputError, OracleFailureError
from star_spectral.models.graph import PotentialVector

log = logging.getLogger(__name__)

MIN_GRID = 16
SHIFT_BELOW = 1.0


@dataclass(frozen=True, eq=False)
class FdSystem:
    """Симметризованная матрица B^{-1/2} A B^{-1/2} и раскладка неизвестных."""

    matrix: sp.csr_matrix
    M: int
    m: int
    neumann_edge: int | None
    offsets: tuple[int, ...]
    center: int
    q_min: float

    @property
    def h(self) -> float:
        return np.pi / self.M

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def symmetry_defect(self) -> float:
        diff = self.matrix - self.matrix.T
        return float(abs(diff).max()) if diff.nnz else 0.0


def assemble(v: PotentialVector, M: int, neumann_edge: int | None = None) -> FdSystem:
    """Собирает систему на сетке с шагом π/M.

    neumann_edge (1..m) заменяет условие Дирихле в вершине v_j на
    y′_j(0) = 0: на этом ребре добавляется узел x = 0 с полуячейкой.
    """
    if M < MIN_GRID:
        raise InvalidInputError(f"Сетка оракула должна иметь M ≥ {MIN_GRID}, получено {M}")
    m = v.m
    if neumann_edge is not None and not 1 <= neumann_edge <= m:
        raise InvalidInputError(f"Номер ребра с условием Неймана должен быть в 1..{m}, получено {neumann_edge}")
    h = np.pi / M
    inv_h2 = 1.0 / h**2
    samples = [p.resample(M).samples for p in v]

    rows: list[int] = []
    cols: list[int] = []
    values: list[float] = []
    diag: list[float] = []
    mass: list[float] = []
    offsets = []

    def couple(a: int, b: int) -> None:
        rows.extend((a, b))
        cols.extend((b, a))
        values.extend((-inv_h2, -inv_h2))

    last_nodes = []
    for j, q in enumerate(samples, start=1):
        start = len(diag)
        offsets.append(start)
        if j == neumann_edge:
            diag.append(inv_h2 + 0.5 * q[0])
            mass.append(0.5)
        for i in range(1, M):
            diag.append(2.0 * inv_h2 + q[i])
            mass.append(1.0)
        for a in range(start, len(diag) - 1):
            couple(a, a + 1)
        last_nodes.append(len(diag) - 1)

    center = len(diag)
    diag.append(m * inv_h2 + 0.5 * sum(q[-1] for q in samples))
    mass.append(0.5 * m)
    for node in last_nodes:
        couple(node, center)

    n = len(diag)
    A = sp.coo_matrix((values, (rows, cols)), shape=(n, n)).tocsr() + sp.diags(diag)
    scale = sp.diags(1.0 / np.sqrt(mass))
    matrix = (scale @ A @ scale).tocsr()
    return FdSystem(
        matrix=matrix,
        M=M,
        m=m,
        neumann_edge=neumann_edge,
        offsets=tuple(offsets),
        center=center,
        q_min=float(min(q.min() for q in samples)),
    )


def oracle_eigenvalues(
    v: PotentialVector,
    M: int = 2000,
    count: int = 10,
    neumann_edge: int | None = None,
    dense: bool = False,
) -> np.ndarray:
    """Наименьшие count собственных значений разностного оператора по возрастанию.

    По умолчанию — разреженный shift-invert (eigsh) со сдвигом ниже min q;
    dense=True решает полную задачу scipy.linalg.eigh (медленно, для
    контрольных прогонов).
    """
    system = assemble(v, M, neumann_edge)
    if not 1 <= count < system.dimension - 1:
        raise InvalidInputError(f"count должно быть в 1..{system.dimension - 2}, получено {count}")
    log.debug("fd oracle: M=%d, dim=%d, dense=%s", M, system.dimension, dense)
    try:
        if dense:
            values = scipy.linalg.eigh(
                system.matrix.toarray(), eigvals_only=True, subset_by_index=[0, count - 1]
            )
        else:
            sigma = system.q_min - SHIFT_BELOW
            values = eigsh(system.matrix.tocsc(), k=count, sigma=sigma, which="LM", return_eigenvectors=False)
    except (ArpackError, ArpackNoConvergence, np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise OracleFailureError(f"Собственные значения оракула не найдены: {e}") from e
    values = np.sort(np.real(values))
    if not np.all(np.isfinite(values)):
        raise OracleFailureError("Оракул вернул нечисловые собственные значения")
    return values
