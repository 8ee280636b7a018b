import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from star_spectral.config import RunConfig, load_config
from star_spectral.entire.remainders import cauchy_coeffs, pw_extract
from star_spectral.errors import ConfigError, InvalidInputError, StarSpectralError
from star_spectral.inverse.conversion import ip1_to_ip2, known_columns
from star_spectral.inverse.experiment import stability_experiment
from star_spectral.inverse.reconstruct import ReconstructOptions, reconstruct
from star_spectral.models.data import SpectralDataIP1, SpectralDataIP2
from star_spectral.models.graph import PotentialVector, random_in_ball
from star_spectral.ode.engine import StarSystem
from star_spectral.oracle.fd import oracle_eigenvalues
from star_spectral.reports import (
    read_potentials,
    read_spectral_data,
    write_csv,
    write_json,
    write_potentials,
    write_spectral_data,
)
from star_spectral.spectral.forward import (
    asymptotic_report,
    locate_aux_spectra,
    locate_aux_spectrum,
    locate_spectrum,
    weight_numbers,
    weight_sum_rule,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


def progress_callback(current: int, total: int, status: str) -> None:
    print(f"  [{current}/{total}] {status}")


def build_config(args: argparse.Namespace) -> RunConfig:
    return load_config(
        getattr(args, "config", None),
        m=args.m,
        grid_points=args.grid_points,
        modes=args.modes,
        seed=args.seed,
        q_ball=getattr(args, "q_ball", None),
        ensemble_size=getattr(args, "pairs", None),
        workers=getattr(args, "workers", None),
        reconstruct_pairs=getattr(args, "reconstruct_pairs", None),
        slow=getattr(args, "slow", None),
        max_iters=getattr(args, "max_iters", None),
        damping=getattr(args, "damping", None),
        alpha_shift=getattr(args, "alpha", None),
        pw_radius=getattr(args, "radius", None),
        oracle_grid_points=getattr(args, "oracle_grid", None),
        oracle_count=getattr(args, "count", None),
    )


def load_potentials(args: argparse.Namespace, config: RunConfig) -> PotentialVector:
    """--potential DIR, иначе --random (шар q_ball, зерно seed), иначе q ≡ 0."""
    if args.potential:
        v = read_potentials(Path(args.potential))
        if v.m != config.m:
            raise InvalidInputError(f"В каталоге {args.potential} задано m = {v.m}, в конфигурации m = {config.m}")
        return v.resample(config.grid_points)
    if args.random:
        return random_in_ball(config.graph, config.q_ball, config.seed)
    return PotentialVector.zero(config.graph)


def _output_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_char_scan(args: argparse.Namespace) -> int:
    config = build_config(args)
    v = load_potentials(args, config)
    rho = np.linspace(args.rho_min, args.rho_max, args.points)
    system = StarSystem(v, config.graph)
    delta, aux = system.characteristic(rho**2)
    # ρ^{m−1}Δ и ρ^{m−2}Δ_j, j = 1..m−1, ограничены на вещественной оси
    scaled = rho ** (v.m - 1) * delta.real
    scaled_aux = rho[None, :] ** (v.m - 2) * aux[: v.m - 1].real
    out = _output_dir(args)
    header = ["rho", "scaled_delta", *(f"scaled_delta_{j}" for j in range(1, v.m))]
    rows = ([rho[i], scaled[i], *scaled_aux[:, i]] for i in range(rho.size))
    path = write_csv(out / "char_scan.csv", header, rows)
    print(f"Характеристическая функция: {rho.size} точек -> {path}")
    return EXIT_OK


def _spectrum_rows(spectrum, j: int | None = None):
    for e in spectrum:
        prefix = [j] if j is not None else []
        yield [*prefix, e.n, e.k, e.lam, e.rho, e.multiplicity, e.remainder]


def _tail_summary(reports) -> dict:
    return {
        r.name: {"total": r.total, "tail_share": r.tail_share(max(2, r.remainders.shape[0] // 2))}
        for r in reports
    }


def cmd_spectrum(args: argparse.Namespace) -> int:
    config = build_config(args)
    v = load_potentials(args, config)
    spectrum = locate_spectrum(v, config.modes, config.graph)
    out = _output_dir(args)
    path = write_csv(
        out / "spectrum.csv",
        ["n", "k", "lambda", "rho", "multiplicity", "kappa"],
        _spectrum_rows(spectrum),
    )
    write_json(
        out / "spectrum.json",
        {
            "m": spectrum.m,
            "N": spectrum.N,
            "lambdas": spectrum.lambdas,
            "has_negative": spectrum.has_negative,
            "remainders": _tail_summary(asymptotic_report(spectrum)),
        },
        config.config_hash(),
    )
    print(f"Собственные значения: N = {spectrum.N}, m = {spectrum.m} -> {path}")
    return EXIT_OK


def cmd_aux_spectra(args: argparse.Namespace) -> int:
    config = build_config(args)
    v = load_potentials(args, config)
    spectrum = locate_spectrum(v, config.modes, config.graph)
    aux = locate_aux_spectra(v, config.modes, config.graph)
    out = _output_dir(args)
    rows = [row for a in aux for row in _spectrum_rows(a, a.j)]
    path = write_csv(out / "aux_spectra.csv", ["j", "n", "k", "lambda", "rho", "multiplicity", "kappa"], rows)
    data = SpectralDataIP1(spectrum.lambdas, np.array([a.lambdas for a in aux]))
    write_spectral_data(out / "spectra_ip1.json", data, config.config_hash())
    print(f"Вспомогательные спектры: j = 1..{v.m - 1}, N = {config.modes} -> {path}")
    return EXIT_OK


def cmd_weights(args: argparse.Namespace) -> int:
    config = build_config(args)
    v = load_potentials(args, config)
    spectrum = locate_spectrum(v, config.modes, config.graph)
    weights = weight_numbers(v, spectrum, config.graph)
    sums = weight_sum_rule(v, spectrum, weights, config.graph)
    multiplicities = np.array([len(c) for c in spectrum.clusters()])
    out = _output_dir(args)
    N, m = weights.N, weights.m
    rows = (
        [n + 1, k + 1, j + 1, weights.alpha[n, k, j], weights.beta[n, k, j]]
        for n in range(N)
        for k in range(m)
        for j in range(m)
    )
    path = write_csv(out / "weights.csv", ["n", "k", "j", "alpha", "beta"], rows)
    data = SpectralDataIP2(spectrum.lambdas, weights.beta)
    write_spectral_data(out / "spectral_data.json", data, config.config_hash())
    write_json(
        out / "weights.json",
        {
            "sum_rule_max_defect": float(np.max(np.abs(sums - multiplicities))),
            "nonnegative": weights.is_nonnegative,
            "remainders": _tail_summary(asymptotic_report(weights)),
        },
        config.config_hash(),
    )
    print(f"Весовые числа: N = {N}, m = {m} -> {path}")
    return EXIT_OK


def cmd_pw_extract(args: argparse.Namespace) -> int:
    config = build_config(args)
    v = load_potentials(args, config)
    result = pw_extract(v, config.pw_radius, config.pw_samples, partial=args.partial, config=config.graph)
    names = list(result.values)
    out = _output_dir(args)
    rows = ([rho, *(result.values[name][i] for name in names)] for i, rho in enumerate(result.rho))
    path = write_csv(out / "pw.csv", ["rho", *names], rows)
    write_json(
        out / "pw.json",
        {
            "norms": result.norms,
            "support": result.support,
            "parity": result.parity,
            "parity_defect": {name: result.parity_defect(name) for name in names},
        },
        config.config_hash(),
    )
    print(f"Остатки Пэли–Винера: {', '.join(names)} -> {path}")
    return EXIT_OK


def cmd_cauchy(args: argparse.Namespace) -> int:
    config = build_config(args)
    v = load_potentials(args, config)
    coefficients = cauchy_coeffs(v, config.alpha_shift, config.modes, config.graph)
    out = _output_dir(args)
    rows = (
        [int(n), nu.real, nu.imag, k.real, k.imag, h.real, h.imag]
        for n, nu, k, h in zip(coefficients.n, coefficients.nu, coefficients.k_hat, coefficients.h_hat)
    )
    path = write_csv(out / "cauchy.csv", ["n", "nu_re", "nu_im", "k_re", "k_im", "h_re", "h_im"], rows)
    write_json(
        out / "cauchy.json",
        {
            "alpha_shift": coefficients.alpha_shift,
            "k_norm": coefficients.k_norm,
            "h_norm": coefficients.h_norm,
            "symmetry_defect": coefficients.symmetry_defect,
        },
        config.config_hash(),
    )
    print(f"Коэффициенты данных Коши: ‖k̂‖ = {coefficients.k_norm:.6g}, ‖ĥ‖ = {coefficients.h_norm:.6g} -> {path}")
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    config = build_config(args)
    v = load_potentials(args, config)
    count = config.oracle_count
    values = oracle_eigenvalues(
        v, config.oracle_grid_points, count, neumann_edge=args.neumann_edge, dense=config.slow
    )
    N = min(math.ceil(count / v.m) + 1, config.graph.max_modes)
    if args.neumann_edge is None:
        solver = locate_spectrum(v, N, config.graph)
    else:
        solver = locate_aux_spectrum(v, N, args.neumann_edge, config.graph)
    solver_values = np.sort(solver.lambdas.ravel())[:count]
    out = _output_dir(args)
    rows = (
        [i + 1, a, b, abs(a - b)]
        for i, (a, b) in enumerate(zip(values, solver_values))
    )
    path = write_csv(out / "oracle.csv", ["index", "lambda_oracle", "lambda_solver", "abs_diff"], rows)
    worst = float(np.max(np.abs(values[: solver_values.size] - solver_values)))
    print(f"Оракул: {count} значений, max |Δλ| = {worst:.3g} -> {path}")
    return EXIT_OK


def cmd_reconstruct(args: argparse.Namespace) -> int:
    config = build_config(args)
    data = read_spectral_data(Path(args.data))
    if isinstance(data, SpectralDataIP1):
        data = known_columns(data)
    if data.m != config.m:
        if args.m is not None:
            raise InvalidInputError(f"В данных m = {data.m}, а задано --m {args.m}")
        config = config.with_overrides(m=data.m)
    options = ReconstructOptions(config.max_iters, config.tol, config.damping, config.grid_points)
    print(f"Восстановление: N = {data.N}, m = {data.m}")
    result = reconstruct(data, options, progress_callback=None if args.quiet else progress_callback)
    out = _output_dir(args)
    write_potentials(result.potentials, out / "potentials")
    trace_rows = [[r.iteration, r.update_norm, r.rho_mismatch, r.tail_estimate] for r in result.trace]
    write_csv(out / "trace.csv", ["iteration", "update_norm", "rho_mismatch", "tail_estimate"], trace_rows)
    write_json(
        out / "trace.json",
        {"converged": result.converged, "iterations": result.iterations, "trace": trace_rows},
        config.config_hash(),
    )
    status = "сошлось" if result.converged else "не сошлось"
    print(f"Готово ({status}, итераций: {result.iterations}). Потенциалы: {out / 'potentials'}")
    return EXIT_OK


def cmd_ip1_convert(args: argparse.Namespace) -> int:
    config = build_config(args)
    data = read_spectral_data(Path(args.data))
    if not isinstance(data, SpectralDataIP1):
        raise InvalidInputError(f"{args.data}: ожидались m спектров (вид ip1)")
    options = ReconstructOptions(config.max_iters, config.tol, config.damping, config.grid_points)
    converted = ip1_to_ip2(data, options)
    out = _output_dir(args)
    path = write_spectral_data(out / "spectral_data.json", converted, config.config_hash())
    print(f"Преобразовано: N = {converted.N}, m = {converted.m} -> {path}")
    return EXIT_OK


def cmd_stability(args: argparse.Namespace) -> int:
    config = build_config(args)
    options = None
    if config.reconstruct_pairs:
        options = ReconstructOptions(config.max_iters, config.tol, config.damping, config.grid_points)
    print(f"Ансамбль: Q = {config.q_ball}, пар: {config.ensemble_size}, N = {config.modes}, seed = {config.seed}")
    report = stability_experiment(
        config.q_ball,
        config.ensemble_size,
        config.modes,
        config.seed,
        config=config.graph,
        workers=config.workers,
        reconstruct_options=options,
        progress_callback=None if args.quiet else progress_callback,
    )
    out = _output_dir(args)
    rows = [p.to_row() for p in report.pairs]
    header = list(rows[0]) if rows else []
    write_csv(out / "stability.csv", header, ([row[h] for h in header] for row in rows))
    write_json(out / "stability.json", {"summary": report.summary(), "pairs": rows}, config.config_hash())
    print(f"max ratio = {report.max_ratio:.6g}, median = {report.median_ratio:.6g}, ошибок: {report.failures}")
    return EXIT_OK


COMMANDS = {
    "char-scan": cmd_char_scan,
    "spectrum": cmd_spectrum,
    "aux-spectra": cmd_aux_spectra,
    "weights": cmd_weights,
    "pw-extract": cmd_pw_extract,
    "cauchy": cmd_cauchy,
    "oracle": cmd_oracle,
    "reconstruct": cmd_reconstruct,
    "ip1-convert": cmd_ip1_convert,
    "stability": cmd_stability,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="Файл параметров TOML (плоский набор ключей)")
    common.add_argument("--out", default="out", help="Каталог для отчётов (по умолчанию: out)")
    common.add_argument("--seed", type=int, help="Зерно генератора (по умолчанию: 42)")
    common.add_argument("--m", type=int, help="Число рёбер звезды (по умолчанию: 3)")
    common.add_argument("--grid-points", type=int, help="Число шагов сетки M на ребре (по умолчанию: 512)")
    common.add_argument("--modes", type=int, help="Число оболочек N (по умолчанию: 30)")
    common.add_argument("--quiet", action="store_true", help="Только предупреждения и итоговые строки")

    potential = argparse.ArgumentParser(add_help=False)
    potential.add_argument("--potential", metavar="DIR", help="Каталог с edge_j.csv и meta.json")
    potential.add_argument(
        "--random",
        action="store_true",
        help="Случайный потенциал из шара радиуса q_ball с зерном seed",
    )

    parser = argparse.ArgumentParser(
        prog="star-spectral",
        description="Прямые и обратные спектральные задачи Штурма–Лиувилля на графе-звезде",
    )
    subparsers = parser.add_subparsers(dest="command", help="Доступные команды")

    scan = subparsers.add_parser(
        "char-scan", parents=[common, potential], help="ρ^{m−1}Δ(ρ²) и ρ^{m−2}Δ_j(ρ²) на сетке ρ"
    )
    scan.add_argument("--rho-min", type=float, default=0.0, help="Начало сетки по ρ = √λ (по умолчанию: 0)")
    scan.add_argument("--rho-max", type=float, default=10.0, help="Конец сетки по ρ (по умолчанию: 10)")
    scan.add_argument("--points", type=int, default=1001, help="Число точек (по умолчанию: 1001)")

    subparsers.add_parser("spectrum", parents=[common, potential], help="Собственные значения λ_nk")
    subparsers.add_parser("aux-spectra", parents=[common, potential], help="Вспомогательные спектры Λ_j")
    subparsers.add_parser("weights", parents=[common, potential], help="Весовые числа α_nkj и β_nkj")

    pw = subparsers.add_parser("pw-extract", parents=[common, potential], help="Остатки F, F_k класса Пэли–Винера")
    pw.add_argument("--radius", type=float, help="Полуширина окна по ρ (по умолчанию: 4m)")
    pw.add_argument("--partial", action="store_true", help="Добавить частичные функции f, f₁, g, g₁")

    cauchy = subparsers.add_parser("cauchy", parents=[common, potential], help="Коэффициенты k̂_n, ĥ_n ребра m")
    cauchy.add_argument("--alpha", type=float, help="Сдвиг узлов ν_n = n + iα (по умолчанию: 0.5)")

    oracle = subparsers.add_parser("oracle", parents=[common, potential], help="Сверка с разностным оракулом")
    oracle.add_argument("--count", type=int, help="Число сравниваемых значений (по умолчанию: 10)")
    oracle.add_argument("--oracle-grid", type=int, help="Шагов сетки оракула на ребре (по умолчанию: 2000)")
    oracle.add_argument("--neumann-edge", type=int, help="Ребро j с условием Неймана (спектр Λ_j)")
    oracle.add_argument("--slow", action="store_true", default=None, help="Плотный решатель eigh вместо eigsh")

    rec = subparsers.add_parser("reconstruct", parents=[common], help="Восстановить потенциалы по данным")
    rec.add_argument("data", help="JSON со спектральными данными (вид ip2 или ip1)")
    rec.add_argument("--max-iters", type=int, help="Максимум итераций (по умолчанию: 30)")
    rec.add_argument("--damping", type=float, help="Демпфирование поправки в (0, 1] (по умолчанию: 1)")

    convert = subparsers.add_parser("ip1-convert", parents=[common], help="m спектров -> собственные значения и веса")
    convert.add_argument("data", help="JSON с m спектрами (вид ip1)")

    stability = subparsers.add_parser("stability", parents=[common], help="Эксперимент устойчивости на ансамбле")
    stability.add_argument("--q-ball", type=float, help="Радиус шара Q (по умолчанию: 0.5)")
    stability.add_argument("--pairs", type=int, help="Число пар (по умолчанию: 20)")
    stability.add_argument("--workers", type=int, help="Число процессов (по умолчанию: 1 или STAR_SPECTRAL_WORKERS)")
    stability.add_argument(
        "--reconstruct-pairs",
        action="store_true",
        default=None,
        help="Дополнительно восстанавливать обе половины каждой пары",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    command = COMMANDS.get(args.command)
    if command is None:
        parser.print_help()
        return EXIT_OK

    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return command(args)
    except (ConfigError, InvalidInputError) as e:
        print(f"Ошибка: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"Ошибка ввода-вывода: {e}", file=sys.stderr)
        return EXIT_IO
    except StarSpectralError as e:
        print(f"Ошибка: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
