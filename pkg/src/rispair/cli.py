"""Command-line front-end.

Subcommands: `rate` (one-shot rates for a given phase vector),
`optimize` (single optimization run), `sweep` (parameter sweeps emitting
CSV/JSONL rows), and `validate` (oracle cross-checks).

Exit codes: 0 success, 1 validation-report failure, 2 configuration
error, 3 infeasible exhaustive search.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from .channel import substream
from .experiments import (
    ConfigError,
    ExperimentConfig,
    ResultRow,
    SCHEMES,
    SWEEP_KINDS,
    default_config,
    emit_results,
    load_config,
    render_results,
    run_sweep,
    snr_to_power,
    validate_oracles,
    _with_powers,
)
from .optimize import (
    ContinuousPhases,
    DiscretePhases,
    InfeasibleSearchError,
    exhaustive_search,
    ga_optimize,
    random_search,
)
from .rate import PhaseConfig, approx_rates, monte_carlo_rates


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="YAML experiment configuration")
    p.add_argument("--seed", type=int, metavar="U64", help="override the master seed")
    p.add_argument("--out", metavar="PATH", help="write result rows to this file")
    p.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--trials", type=int, metavar="N", help="Monte-Carlo trials")
    p.add_argument("--bits", type=int, metavar="B", help="discrete phase bits")
    p.add_argument("--continuous", action="store_true", help="use continuous phases")
    p.add_argument("--elements", type=int, metavar="L", help="number of surface elements")
    p.add_argument("--snr-db", metavar="LIST", help="comma-separated SNR values in dB")


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"{flag}: {exc}") from exc


def _build_config(args: argparse.Namespace) -> ExperimentConfig:
    config = load_config(args.config) if args.config else default_config()
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    if args.trials is not None:
        config = dataclasses.replace(config, trials_mc=args.trials, with_mc=True)
    if args.bits is not None and args.continuous:
        raise ConfigError("--bits and --continuous are mutually exclusive")
    if args.bits is not None:
        config = dataclasses.replace(config, phase_domain=DiscretePhases(args.bits))
    if args.continuous:
        config = dataclasses.replace(config, phase_domain=ContinuousPhases())
    if args.elements is not None:
        system = dataclasses.replace(config.system, L=args.elements)
        config = dataclasses.replace(config, system=system)
    if args.snr_db is not None:
        values = _parse_float_list(args.snr_db, "--snr-db")
        if not values:
            raise ConfigError("--snr-db: empty list")
        config = dataclasses.replace(config, snr_grid=tuple(values))
        if len(values) == 1:
            config = dataclasses.replace(
                config, system=_with_powers(config.system, snr_to_power(values[0]))
            )
    return config


def _theta_from_args(args: argparse.Namespace, config: ExperimentConfig) -> PhaseConfig:
    if args.levels is not None:
        if not isinstance(config.phase_domain, DiscretePhases):
            raise ConfigError("--levels requires a discrete phase domain (--bits)")
        levels = [int(v) for v in args.levels.split(",") if v.strip() != ""]
        return PhaseConfig.from_levels(levels, config.phase_domain.bits)
    if args.theta is not None:
        return PhaseConfig.continuous(_parse_float_list(args.theta, "--theta"))
    L = config.system.L
    if isinstance(config.phase_domain, DiscretePhases):
        return PhaseConfig.from_levels(np.zeros(L, dtype=np.int64), config.phase_domain.bits)
    return PhaseConfig.continuous(np.zeros(L))


def _print_report(label: str, report) -> None:
    print(f"{label}: sum rate {report.sum:.6f} bits/s/Hz")
    for i, r in enumerate(report.per_pair):
        se = ""
        if report.std_error is not None:
            se = f" (se {report.std_error[i]:.2e})"
        print(f"  pair {i + 1}: {r:.6f}{se}")


def _oneshot_rows(reports, config: ExperimentConfig) -> list[ResultRow]:
    rows = []
    for rep in reports:
        rows.append(
            ResultRow(
                sweep_var="oneshot",
                value=0.0,
                scheme="fixed",
                method=rep.method,
                per_pair=tuple(float(r) for r in rep.per_pair),
                sum_rate=rep.sum,
                std_error=rep.sum_std_error if rep.method == "monte_carlo" else None,
                seed=config.seed,
                generations=0,
                wall_time_ms=0.0,
            )
        )
    return rows


def _cmd_rate(args: argparse.Namespace) -> int:
    config = _build_config(args)
    theta = _theta_from_args(args, config)
    reports = [approx_rates(config.system, theta)]
    _print_report("closed form", reports[0])
    if args.trials:
        mc = monte_carlo_rates(
            config.system, theta, config.trials_mc, substream(config.seed, 7)
        )
        reports.append(mc)
        _print_report(f"monte carlo ({mc.trials} trials)", mc)
    if args.out:
        emit_results(_oneshot_rows(reports, config), args.format, args.out)
    return 0


def _cmd_optimize(args: argparse.Namespace) -> int:
    config = _build_config(args)
    rng = substream(config.seed, 11)
    if args.scheme == "ga":
        result = ga_optimize(config.system, config.ga, config.phase_domain, rng)
    elif args.scheme == "random":
        draws = args.draws if args.draws is not None else config.random_draws
        result = random_search(config.system, config.phase_domain, draws, rng)
    else:
        if not isinstance(config.phase_domain, DiscretePhases):
            raise ConfigError("exhaustive search requires a discrete phase domain (--bits)")
        result = exhaustive_search(config.system, config.phase_domain.bits)
    print(f"scheme {args.scheme}: best sum rate {result.best_sum_rate:.6f} bits/s/Hz")
    print(f"  generations {result.generations_used}, evaluations {result.evaluations}")
    if result.mean_sum_rate is not None:
        print(f"  mean over draws {result.mean_sum_rate:.6f}")
    report = approx_rates(config.system, result.best_theta)
    _print_report("per-pair (closed form)", report)
    if args.out:
        emit_results(_oneshot_rows([report], config), args.format, args.out)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _build_config(args)
    schemes = tuple(args.schemes.split(",")) if args.schemes else None
    if args.draws is not None:
        config = dataclasses.replace(config, random_draws=args.draws)
    rows = run_sweep(args.kind, config, schemes=schemes, include_mc=args.mc or None)
    if args.out:
        emit_results(rows, args.format, args.out)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        sys.stdout.write(render_results(rows, args.format))
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    config = _build_config(args)
    report = validate_oracles(config)
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(
            f"[{status}] {check.name}: max deviation {check.max_deviation:.3e} "
            f"(threshold {check.threshold:g})"
        )
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rispair",
        description="Rate simulation and phase optimization for surface-assisted multi-pair links.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", help="closed-form (and optional Monte-Carlo) rates for a phase vector")
    _add_common(p)
    p.add_argument("--theta", metavar="LIST", help="comma-separated angles in radians")
    p.add_argument("--levels", metavar="LIST", help="comma-separated grid levels (needs --bits)")
    p.set_defaults(func=_cmd_rate)

    p = sub.add_parser("optimize", help="optimize phases with one scheme")
    _add_common(p)
    p.add_argument("--scheme", choices=SCHEMES, default="ga")
    p.add_argument("--draws", type=int, metavar="N", help="random-search draw count")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("sweep", help="run a parameter sweep and emit result rows")
    _add_common(p)
    p.add_argument("--kind", choices=SWEEP_KINDS, required=True)
    p.add_argument("--schemes", metavar="LIST", help="comma-separated schemes (default from config)")
    p.add_argument("--mc", action="store_true", help="add Monte-Carlo rows")
    p.add_argument("--draws", type=int, metavar="N", help="random-search draw count")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("validate", help="run the oracle validation suite")
    _add_common(p)
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleSearchError as exc:
        print(f"infeasible exhaustive search: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
