"""Command-line entry point: ``run``, ``sweep`` and ``report``."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .evolution import SYMBOLS, ConfigError, EvoConfig, GenerationRecord, run
from .experiment import SYMBOL_COLUMNS, write_csv, counter_stats, load_config, report, run_experiment
from .learning import STRATEGIES

RUN_HEADER = ["generation", "best_fitness", *SYMBOL_COLUMNS.values(), "len_mean", "len_std",
              "found"]


def _default_seed() -> int:
    raw = os.environ.get("PLASTIGEN_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"PLASTIGEN_SEED must be an integer, got {raw!r}") from None


def _fitness_line(rec: GenerationRecord) -> str:
    return f"{rec.generation},{rec.best_fitness:.6g}"


def _run_row(rec: GenerationRecord) -> list:
    freqs = rec.symbol_frequencies()
    if rec.expressed_lengths:
        lm, ls = counter_stats(rec.expressed_lengths)
    else:
        lm = ls = float("nan")
    return [rec.generation, rec.best_fitness, *(freqs[s] for s in SYMBOLS), lm, ls,
            int(rec.found)]


def cmd_run(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    cfg = EvoConfig(strategy=args.strategy, grammar=args.grammar, seed=seed)
    overrides = {k: v for k, v in (("generations", args.generations),
                                   ("population_size", args.population),
                                   ("learning_trials", args.trials)) if v is not None}
    cfg = replace(cfg, **overrides)
    cfg.validate()
    out = Path(args.out or f"run_{args.strategy}_{Path(args.grammar).stem}_{seed}.csv")
    result = run(cfg, keep_population=False,
                 on_generation=lambda rec: print(_fitness_line(rec), flush=True))
    write_csv(out, RUN_HEADER, (_run_row(rec) for rec in result.history))
    return 0


def cmd_sweep(args) -> int:
    spec = load_config(args.config)
    spec.output_dir = args.out
    if args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    run_experiment(spec, jobs=args.jobs)
    return 0


def cmd_report(args) -> int:
    report(args.in_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plastigen", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="one treatment, one seed")
    p.add_argument("--grammar", required=True, help="shipped grammar name or .bnf path")
    p.add_argument("--strategy", required=True, choices=STRATEGIES)
    p.add_argument("--seed", type=int, help="default: $PLASTIGEN_SEED or 0")
    p.add_argument("--generations", type=int)
    p.add_argument("--population", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--out", help="per-generation CSV (default run_<strategy>_<grammar>_<seed>.csv)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="every treatment of a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="summary and plot data from a sweep directory")
    p.add_argument("--in", dest="in_dir", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"plastigen: configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - report, don't trace
        print(f"plastigen: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
