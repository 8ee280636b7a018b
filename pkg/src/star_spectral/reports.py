"""Запись отчётов и чтение входных данных.

CSV всегда с заголовком, числа в формате .17g; JSON с сортировкой ключей,
версией схемы, версией пакета и хэшем конфигурации, без отметок времени.
"""

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from star_spectral import __version__
from star_spectral.errors import InvalidInputError, ReportIOError
from star_spectral.models.data import SpectralDataIP1, SpectralDataIP2
from star_spectral.models.graph import EDGE_LENGTH, Potential, PotentialVector

SCHEMA_VERSION = 1
GRID_TOL = 1e-9
META_FILE = "meta.json"


def fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, complex):
        return [_jsonable(value.real), _jsonable(value.imag)]
    return value


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) for v in row])
    except OSError as e:
        raise ReportIOError(f"Не удалось записать {path}: {e}") from e
    return path


def write_json(
    path: Path,
    payload: dict[str, Any],
    config_hash: str | None = None,
    version: str | None = None,
) -> Path:
    document = {"schema": SCHEMA_VERSION, "version": version or __version__, **payload}
    if config_hash is not None:
        document["config_hash"] = config_hash
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(_jsonable(document), f, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)
            f.write("\n")
    except OSError as e:
        raise ReportIOError(f"Не удалось записать {path}: {e}") from e
    return path


def read_json(path: Path) -> dict[str, Any]:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"Некорректный JSON в {path}: {e}") from e
    except OSError as e:
        raise ReportIOError(f"Не удалось прочитать {path}: {e}") from e


def write_potentials(v: PotentialVector, directory: Path) -> Path:
    """edge_j.csv (x,q) для j = 1..m и meta.json {m, M, Q}."""
    directory = Path(directory)
    for j, p in enumerate(v, start=1):
        write_csv(directory / f"edge_{j}.csv", ("x", "q"), zip(p.nodes, p.samples))
    meta = {"m": v.m, "M": v.grid_points, "Q": v.ball_radius}
    try:
        with open(directory / META_FILE, "w", encoding="utf-8") as f:
            json.dump(_jsonable(meta), f, sort_keys=True)
            f.write("\n")
    except OSError as e:
        raise ReportIOError(f"Не удалось записать {directory / META_FILE}: {e}") from e
    return directory


def _read_edge(path: Path, M: int) -> Potential:
    try:
        with open(path, encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise ReportIOError(f"Не удалось прочитать {path}: {e}") from e
    if not rows or [c.strip() for c in rows[0]] != ["x", "q"]:
        raise InvalidInputError(f"{path}: ожидался заголовок x,q")
    try:
        values = np.array([[float(a), float(b)] for a, b in rows[1:]])
    except ValueError as e:
        raise InvalidInputError(f"{path}: некорректная строка данных ({e})") from e
    if values.shape != (M + 1, 2):
        raise InvalidInputError(f"{path}: ожидалось {M + 1} строк, получено {len(rows) - 1}")
    grid = np.linspace(0.0, EDGE_LENGTH, M + 1)
    if np.max(np.abs(values[:, 0] - grid)) > GRID_TOL:
        raise InvalidInputError(f"{path}: узлы x не образуют равномерную сетку на [0, π] с M = {M}")
    return Potential(values[:, 1])


def read_potentials(directory: Path) -> PotentialVector:
    directory = Path(directory)
    meta = read_json(directory / META_FILE)
    try:
        m, M = int(meta["m"]), int(meta["M"])
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidInputError(f"{directory / META_FILE}: нужны целые поля m и M") from e
    potentials = tuple(_read_edge(directory / f"edge_{j}.csv", M) for j in range(1, m + 1))
    return PotentialVector(potentials, meta.get("Q"))


def write_spectral_data(
    path: Path,
    data: SpectralDataIP2 | SpectralDataIP1,
    config_hash: str | None = None,
) -> Path:
    return write_json(path, {"data": data.to_dict()}, config_hash)


def read_spectral_data(path: Path) -> SpectralDataIP2 | SpectralDataIP1:
    payload = read_json(path).get("data")
    if not isinstance(payload, dict):
        raise InvalidInputError(f"{path}: нет раздела data со спектральными данными")
    kind = payload.get("kind")
    if kind == "ip2":
        return SpectralDataIP2.from_dict(payload)
    if kind == "ip1":
        return SpectralDataIP1.from_dict(payload)
    raise InvalidInputError(f"{path}: неизвестный вид спектральных данных {kind!r}")
