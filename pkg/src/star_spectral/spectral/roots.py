"""Поиск нулей ρ-масштабированных характеристических функций.

Схема: скан по равномерной ρ-сетке, уточнение смен знака через
`scipy.optimize.elementwise.find_root`, контроль числа нулей в каждой
оболочке по принципу аргумента на прямоугольнике в комплексной ρ-плоскости. Чётные кратности смены знака
не дают, поэтому в оболочках с недостачей нули добираются степенными
суммами по малым окружностям.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.optimize.elementwise import find_root

from star_spectral.errors import IndexingError
from star_spectral.spectral.base import CharacteristicFunction

log = logging.getLogger(__name__)

REFINE_TOL = 1e-12
BOX_HALF_HEIGHT = 0.5
WINDING_POINTS = 64
WINDING_REFINEMENTS = 5
MOMENT_POINTS = 128
MULTIPLE_SPREAD = 1e-6
MOMENT_NOISE = 1e-10
CLOSE_ROOTS = 1e-4
GRID_RETRIES = 2
GRID_REFINE_FACTOR = 8
LAMBDA_SCAN_MARGIN = 0.5


@dataclass(frozen=True)
class ShellZeros:
    n: int
    lambdas: tuple[float, ...]
    multiplicities: tuple[int, ...]

    @property
    def count(self) -> int:
        return sum(self.multiplicities)

    def expanded(self) -> list[float]:
        return [lam for lam, r in zip(self.lambdas, self.multiplicities) for _ in range(r)]


def refine_brackets(fn, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Векторное уточнение корней в скобках [a, b] со сменой знака."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.size == 0:
        return a
    result = find_root(fn, (a, b), tolerances={"xatol": REFINE_TOL, "xrtol": REFINE_TOL})
    if not np.all(result.success):
        log.debug("bracket refinement stopped early for %d roots", int(np.sum(~result.success)))
    return result.x


def winding_counts(fn, left: np.ndarray, right: np.ndarray, height: float = BOX_HALF_HEIGHT) -> np.ndarray:
    """Число нулей fn в прямоугольниках [left, right] × [−height, height]."""
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    counts = np.full(left.shape, -1, dtype=int)
    pending = np.arange(left.size)
    points = WINDING_POINTS
    for _ in range(WINDING_REFINEMENTS):
        if pending.size == 0:
            break
        t = np.arange(points) / points
        lo, hi = left[pending, None], right[pending, None]
        contour = np.concatenate(
            [
                lo + (hi - lo) * t - 1j * height,
                hi + 1j * height * (2 * t - 1),
                hi - (hi - lo) * t + 1j * height,
                lo - 1j * height * (2 * t - 1),
            ],
            axis=1,
        )
        values = fn(contour.ravel()).reshape(contour.shape)
        closed = np.concatenate([values, values[:, :1]], axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            steps = np.angle(closed[:, 1:] / closed[:, :-1])
        resolved = np.all(np.isfinite(steps), axis=1) & (np.max(np.abs(steps), axis=1) < np.pi / 2)
        totals = np.rint(np.sum(steps, axis=1) / (2 * np.pi)).astype(int)
        counts[pending[resolved]] = totals[resolved]
        pending = pending[~resolved]
        points *= 2
    if pending.size:
        log.debug("winding count unresolved for %d boxes", pending.size)
    return counts


def disk_roots(fn, centers: np.ndarray, radii: np.ndarray) -> list[list[complex]]:
    """Нули внутри окружностей по степенным суммам s_p = (1/2πi)∮ (w − c)^p f′/f dw."""
    centers = np.asarray(centers, dtype=complex)
    radii = np.asarray(radii, dtype=float)
    if centers.size == 0:
        return []
    K = MOMENT_POINTS
    theta = 2 * np.pi * np.arange(K) / K
    z = radii[:, None] * np.exp(1j * theta)[None, :]
    f = fn((centers[:, None] + z).ravel()).reshape(z.shape)
    coefficients = np.fft.fft(f, axis=1) / K
    coefficients[:, K // 2 :] = 0.0
    # Σ j c_j e^{ijθ} = z f′(c + z)
    g = np.fft.ifft(coefficients * np.arange(K)[None, :], axis=1) * K
    ratio = g / f
    result = []
    for i in range(centers.size):
        r = int(np.rint(np.mean(ratio[i]).real))
        if r <= 0:
            result.append([])
            continue
        sums = [np.mean(z[i] ** p * ratio[i]) for p in range(1, r + 1)]
        mean = sums[0] / r
        if r == 1:
            result.append([centers[i] + mean])
            continue
        elementary = [1.0 + 0j]
        for k in range(1, r + 1):
            acc = sum((-1) ** (p - 1) * elementary[k - p] * sums[p - 1] for p in range(1, k + 1))
            elementary.append(acc / k)
        poly = [(-1) ** k * elementary[k] for k in range(r + 1)]
        local = np.roots(poly)
        # an r-fold root spreads by about noise^(1/r) under rounding
        spread = max(MULTIPLE_SPREAD, radii[i] * MOMENT_NOISE ** (1.0 / r))
        if np.max(np.abs(local - mean)) < spread:
            result.append([centers[i] + mean] * r)
        else:
            result.append(list(centers[i] + local))
    return result


def _shell_grid(func: CharacteristicFunction, shells: list[int], step: float) -> tuple[np.ndarray, np.ndarray]:
    grids, owners = [], []
    for n in shells:
        lo, hi = func.shell_edge(n - 1), func.shell_edge(n)
        count = int(np.ceil((hi - lo) / step))
        grids.append(np.linspace(lo, hi, count + 1))
        owners.append(np.full(count + 1, n))
    return np.concatenate(grids), np.concatenate(owners)


def _merge_candidates(points: list[float], tol: float) -> list[float]:
    merged: list[float] = []
    for x in sorted(points):
        if merged and x - merged[-1] < tol:
            continue
        merged.append(x)
    return merged


def _scan_shells(
    func: CharacteristicFunction,
    shells: list[int],
    expected: dict[int, int],
    step: float,
) -> tuple[dict[int, list[float]], list[int]]:
    """Корни по ρ в заданных оболочках; возвращает найденное и список неразрешённых оболочек."""
    fn = lambda rho: func.scaled(rho).real
    grid, owner = _shell_grid(func, shells, step)
    values = fn(grid)
    same = owner[:-1] == owner[1:]
    brackets = np.flatnonzero(same & (values[:-1] * values[1:] < 0))
    roots = refine_brackets(fn, grid[brackets], grid[brackets + 1])
    exact = np.flatnonzero((values == 0) & np.concatenate([[False], same]))
    found: dict[int, list[float]] = {n: [] for n in shells}
    for x, n in zip(roots, owner[brackets]):
        found[int(n)].append(float(x))
    for i in exact:
        found[int(owner[i])].append(float(grid[i]))
    # rounding can split a double root into two sign changes
    suspect = [
        n
        for n in shells
        if len(found[n]) != expected[n] or np.any(np.diff(sorted(found[n])) < CLOSE_ROOTS)
    ]
    if not suspect:
        return found, []
    log.debug("%s: refining shells %s at step %.3g", func.label, suspect, step)
    centers, radii, disk_shell = [], [], []
    magnitude = np.abs(values)
    for n in suspect:
        idx = np.flatnonzero(owner == n)
        interior = idx[1:-1]
        minima = interior[(magnitude[interior] <= magnitude[interior - 1]) & (magnitude[interior] <= magnitude[interior + 1])]
        candidates = _merge_candidates(found[n] + list(grid[minima]), 0.5 * step)
        for i, x in enumerate(candidates):
            gaps = [abs(x - y) for j, y in enumerate(candidates) if j != i]
            radius = min(2 * step, 0.45 * min(gaps)) if gaps else 2 * step
            centers.append(x)
            radii.append(radius)
            disk_shell.append(n)
    located = disk_roots(func.scaled, np.array(centers), np.array(radii))
    unresolved = []
    for n in suspect:
        lo, hi = func.shell_edge(n - 1), func.shell_edge(n)
        inside = [
            float(z.real)
            for roots_in_disk, owner_n in zip(located, disk_shell)
            if owner_n == n
            for z in roots_in_disk
            if lo < z.real <= hi
        ]
        if len(inside) == expected[n]:
            found[n] = inside
        elif len(found[n]) != expected[n]:
            unresolved.append(n)
    return found, unresolved


def _lambda_scan(func: CharacteristicFunction) -> list[float]:
    """Нули ниже первой оболочки (малые и отрицательные λ) по смене знака в λ."""
    upper = func.shell_edge(0) ** 2
    lower = min(float(p.samples.min()) for p in func.system.potentials) - LAMBDA_SCAN_MARGIN
    lower = min(lower, -LAMBDA_SCAN_MARGIN)
    count = int(np.ceil((upper - lower) * 16)) + 32
    grid = np.linspace(lower, upper, count + 1)
    fn = lambda lam: func.values(lam).real
    values = fn(grid)
    brackets = np.flatnonzero(values[:-1] * values[1:] < 0)
    roots = refine_brackets(fn, grid[brackets], grid[brackets + 1])
    exact = grid[np.flatnonzero(values[:-1] == 0)]
    return sorted(float(x) for x in np.concatenate([roots, exact]))


def locate_zeros(func: CharacteristicFunction, N: int) -> list[ShellZeros]:
    """Нули функции по оболочкам n = 1..N, с кратностями, в единицах λ."""
    m = func.m
    shells = list(range(1, N + 1))
    left = np.array([func.shell_edge(n - 1) for n in shells])
    right = np.array([func.shell_edge(n) for n in shells])
    counts = winding_counts(func.scaled, left, right)
    low = _lambda_scan(func)
    if low:
        log.info("%s: %d eigenvalue(s) below the first shell, smallest %.6g", func.label, len(low), low[0])
    expected = {}
    for n, count in zip(shells, counts):
        total = count + (len(low) if n == 1 else 0)
        if count < 0 or total != m:
            raise IndexingError(
                f"{func.label}: в оболочке n = {n} найдено {max(total, 0)} нулей вместо {m}",
                shell=n,
                found=int(max(total, 0)),
                expected=m,
            )
        expected[n] = int(count)

    step = 1.0 / (8 * m)
    found, pending = _scan_shells(func, shells, expected, step)
    for _ in range(GRID_RETRIES):
        if not pending:
            break
        step /= GRID_REFINE_FACTOR
        retry, pending = _scan_shells(func, pending, expected, step)
        found.update({n: retry[n] for n in retry if n not in pending})
    if pending:
        n = pending[0]
        raise IndexingError(
            f"{func.label}: не удалось разрешить нули в оболочке n = {n}",
            shell=n,
            found=len(found[n]),
            expected=expected[n],
        )

    result = []
    for n in shells:
        rhos = sorted(found[n])
        lambdas = [x * x for x in rhos]
        if n == 1:
            lambdas = low + lambdas
        grouped: list[list[float]] = []
        for lam in lambdas:
            if grouped and abs(lam - grouped[-1][0]) <= 1e-9 * max(1.0, abs(lam)):
                grouped[-1].append(lam)
            else:
                grouped.append([lam])
        result.append(
            ShellZeros(
                n=n,
                lambdas=tuple(float(np.mean(g)) for g in grouped),
                multiplicities=tuple(len(g) for g in grouped),
            )
        )
    return result


def assign_indices(lambdas: list[float], asymptotes: np.ndarray) -> np.ndarray:
    """Нумерация нулей оболочки по ближайшей асимптоте.

    Отрицательные λ сравниваются с квадратами асимптот в λ, остальные по ρ.
    Внутри группы равных асимптот значения идут по возрастанию k.
    """
    lam = np.asarray(lambdas, dtype=float)
    if lam.size != asymptotes.size:
        raise IndexingError(
            f"Число нулей оболочки ({lam.size}) не совпадает с числом ветвей ({asymptotes.size})",
            shell=0,
            found=int(lam.size),
            expected=int(asymptotes.size),
        )
    if np.any(lam < 0):
        cost = np.abs(lam[:, None] - asymptotes[None, :] ** 2)
    else:
        cost = np.abs(np.sqrt(lam)[:, None] - asymptotes[None, :])
    rows, cols = linear_sum_assignment(cost)
    ordered = np.empty_like(lam)
    ordered[cols] = lam[rows]
    for value in np.unique(np.round(asymptotes, 12)):
        group = np.flatnonzero(np.isclose(asymptotes, value, rtol=0.0, atol=1e-12))
        ordered[group] = np.sort(ordered[group])
    return ordered
