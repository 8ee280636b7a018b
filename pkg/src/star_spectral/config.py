"""Параметры прогона: значения по умолчанию < TOML-файл < флаги командной строки."""

import hashlib
import json
import os
import tomllib
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

from star_spectral.errors import ConfigError, InvalidInputError
from star_spectral.models.graph import StarGraphConfig

WORKERS_ENV = "STAR_SPECTRAL_WORKERS"


@dataclass(frozen=True)
class RunConfig:
    m: int = 3
    grid_points: int = 512
    modes: int = 30
    lambda_max: float = 1e4
    seed: int = 42
    q_ball: float = 0.5
    ensemble_size: int = 20
    alpha_shift: float = 0.5
    max_iters: int = 30
    tol: float = 1e-8
    damping: float = 1.0
    oracle_grid_points: int = 2000
    oracle_count: int = 10
    pw_radius: float | None = None
    pw_samples: int = 801
    workers: int = 1
    reconstruct_pairs: bool = False
    slow: bool = False

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            expected = _scalar_type(f.type)
            if expected is bool:
                ok = isinstance(value, bool)
            elif expected is float:
                ok = isinstance(value, (int, float)) and not isinstance(value, bool)
                if ok:
                    object.__setattr__(self, f.name, float(value))
            else:
                ok = isinstance(value, int) and not isinstance(value, bool)
            if not ok:
                raise ConfigError(f"Параметр {f.name}: ожидался тип {expected.__name__}, получено {value!r}")

        if self.modes < 1:
            raise ConfigError(f"modes должно быть ≥ 1, получено {self.modes}")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError(f"seed должен быть в диапазоне 0..2^64−1, получено {self.seed}")
        if not self.q_ball > 0:
            raise ConfigError(f"q_ball должно быть положительным, получено {self.q_ball}")
        if self.ensemble_size < 1 or self.workers < 1:
            raise ConfigError("ensemble_size и workers должны быть ≥ 1")
        if not 0 < self.alpha_shift <= 2:
            raise ConfigError(f"alpha_shift должно лежать в (0, 2], получено {self.alpha_shift}")
        if self.max_iters < 1 or not self.tol > 0 or not 0 < self.damping <= 1:
            raise ConfigError("Требуется max_iters ≥ 1, tol > 0 и damping в (0, 1]")
        if self.oracle_count < 1:
            raise ConfigError(f"oracle_count должно быть ≥ 1, получено {self.oracle_count}")
        if self.pw_radius is not None and self.pw_radius < 2 * self.m:
            raise ConfigError(f"pw_radius должен быть ≥ 2m = {2 * self.m}, получено {self.pw_radius}")
        if self.pw_samples < 3 or self.pw_samples % 2 == 0:
            raise ConfigError(f"pw_samples должно быть нечётным и ≥ 3, получено {self.pw_samples}")
        try:
            StarGraphConfig(self.m, self.grid_points, self.lambda_max)
        except InvalidInputError as e:
            raise ConfigError(str(e)) from e

    @property
    def graph(self) -> StarGraphConfig:
        return StarGraphConfig(self.m, self.grid_points, self.lambda_max)

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Заменяет поля, значение которых не None (явно заданные флаги)."""
        values = {k: v for k, v in overrides.items() if v is not None}
        unknown = set(values) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigError(f"Неизвестные параметры: {', '.join(sorted(unknown))}")
        return replace(self, **values)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _scalar_type(annotation: Any) -> type:
    args = getattr(annotation, "__args__", None)
    if args:
        return next(a for a in args if a is not type(None))
    return annotation


def read_config_file(path: Path) -> dict[str, Any]:
    """Плоский TOML: только скалярные ключи верхнего уровня."""
    try:
        with open(path, "rb") as f:
            payload = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Некорректный TOML в {path}: {e}") from e
    known = {f.name for f in fields(RunConfig)}
    for key, value in payload.items():
        if isinstance(value, (dict, list)):
            raise ConfigError(f"Параметр {key}: вложенные таблицы и массивы не поддерживаются")
        if key not in known:
            raise ConfigError(f"Неизвестный параметр в {path}: {key}")
    return payload


def load_config(path: Path | None = None, **overrides: Any) -> RunConfig:
    values: dict[str, Any] = {}
    if path is not None:
        values.update(read_config_file(Path(path)))
    if "workers" not in values and overrides.get("workers") is None and WORKERS_ENV in os.environ:
        raw = os.environ[WORKERS_ENV]
        try:
            values["workers"] = int(raw)
        except ValueError as e:
            raise ConfigError(f"{WORKERS_ENV} должно быть целым числом, получено {raw!r}") from e
    try:
        config = RunConfig(**values)
    except TypeError as e:
        raise ConfigError(str(e)) from e
    return config.with_overrides(**overrides)
