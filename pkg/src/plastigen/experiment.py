"""Replicated experiments, summary statistics and CSV persistence."""

from __future__ import annotations

import csv
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy import stats

from .evolution import SYMBOLS, ConfigError, EvoConfig, GenerationRecord, Population, RunResult, run
from .grammar import load_grammar
from .learning import STRATEGIES, TrialRecord

SYMBOL_COLUMNS = {"1": "sym_1", "0": "sym_0", "?": "sym_q", "~": "sym_tilde"}

#: Every treatment of the study, as ``strategy@grammar``.
ALL_TREATMENTS = (
    "nolearning@fixed_nolearning",
    "rollouts@fixed_nolearning",
    "asocial@fixed_plastic",
    "nolearning@variable_nolearning",
    "rollouts@variable_nolearning",
    "asocial@variable_plastic",
    "plastic_expansion@variable_expansion",
    "tabulist@variable_expansion",
    "social@variable_expansion",
)


class EmptyPool(ValueError):
    pass


def fmt(x: float) -> str:
    return f"{x:.6g}"


@dataclass(frozen=True)
class Treatment:
    strategy: str
    grammar: str

    @classmethod
    def parse(cls, text: str) -> "Treatment":
        strategy, sep, grammar = text.strip().partition("@")
        if not sep or not grammar:
            raise ConfigError(f"treatment {text!r} must look like strategy@grammar")
        return cls(strategy.strip(), grammar.strip().removesuffix(".bnf"))

    @property
    def name(self) -> str:
        return f"{self.strategy}@{self.grammar}"


@dataclass
class ExperimentSpec:
    treatments: list[Treatment] = field(
        default_factory=lambda: [Treatment.parse(t) for t in ALL_TREATMENTS])
    replications: int = 30
    base_seed: int = 0
    output_dir: str | None = "results"
    evo: EvoConfig = field(default_factory=EvoConfig)

    def validate(self) -> None:
        if self.replications < 1:
            raise ConfigError("replications must be positive")
        if not self.treatments:
            raise ConfigError("no treatments given")
        names = [t.name for t in self.treatments]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate treatment")
        for t in self.treatments:
            if t.strategy not in STRATEGIES:
                raise ConfigError(f"unknown strategy {t.strategy!r}")
            self.config_for(t, 0).validate()

    def seeds(self) -> list[int]:
        """Seed list shared by every treatment."""
        return [self.base_seed + i for i in range(self.replications)]

    def config_for(self, t: Treatment, seed: int) -> EvoConfig:
        return replace(self.evo, strategy=t.strategy, grammar=t.grammar, seed=seed)


def _coerce(raw: str, like):
    if isinstance(like, bool):
        low = raw.lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ConfigError(f"expected a boolean, got {raw!r}")
        return low in ("true", "1", "yes")
    if isinstance(like, int):
        return int(raw)
    if isinstance(like, float):
        return float(raw)
    return raw


def parse_config(text: str) -> ExperimentSpec:
    """Read ``key = value`` lines; keys are ExperimentSpec or EvoConfig field names."""
    spec = ExperimentSpec()
    evo_values = {}
    evo_fields = {f.name: getattr(spec.evo, f.name) for f in fields(EvoConfig)}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value")
        try:
            if key == "treatments":
                spec.treatments = [Treatment.parse(t) for t in value.split(",") if t.strip()]
            elif key == "replications":
                spec.replications = int(value)
            elif key == "base_seed":
                spec.base_seed = int(value)
            elif key == "output_dir":
                spec.output_dir = value
            elif key in evo_fields:
                evo_values[key] = _coerce(value, evo_fields[key])
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    spec.evo = replace(spec.evo, **evo_values)
    return spec


def load_config(path: str | Path) -> ExperimentSpec:
    return parse_config(Path(path).read_text())


def counter_stats(counts: Counter) -> tuple[float, float]:
    """Mean and population standard deviation of a value -> count table."""
    n = sum(counts.values())
    if n == 0:
        raise EmptyPool("no values to summarise")
    values = np.fromiter(counts.keys(), float)
    weights = np.fromiter(counts.values(), float)
    mean = float(np.dot(values, weights) / n)
    var = float(np.dot(weights, (values - mean) ** 2) / n)
    return mean, math.sqrt(var)


def length_stats(records: Iterable[TrialRecord]) -> tuple[float, float]:
    """Mean and population std of every expressed phenotype length in ``records``."""
    pooled: Counter = Counter()
    for rec in records:
        pooled.update(rec.expressed_lengths)
    return counter_stats(pooled)


def symbol_frequencies(pop: Population) -> dict[str, float]:
    """Relative frequency of each phenome symbol, pooled over valid mappings."""
    counts: Counter = Counter()
    for ind in pop.individuals:
        if ind.outcome is not None and ind.outcome.ok:
            counts.update(s.text for s in ind.outcome.phenome.symbols)
    total = sum(counts.values())
    if total == 0:
        raise EmptyPool("no individual mapped successfully")
    freqs = {s: 0.0 for s in SYMBOLS}
    freqs.update({s: c / total for s, c in counts.items()})
    return freqs


def binomial_ci(successes: int, n: int, level: float = 0.95) -> tuple[float, float]:
    ci = stats.binomtest(successes, n).proportion_ci(confidence_level=level, method="exact")
    return float(ci.low), float(ci.high)


@dataclass
class GenStats:
    generation: int
    mean_best_fitness: float
    symbols: dict[str, float]
    len_mean: float
    len_std: float


@dataclass
class TreatmentSummary:
    treatment: str
    replications: int
    successes: int
    ci_low: float
    ci_high: float
    len_mean: float
    len_std: float
    max_len_mean: float
    max_len_std: float
    success_generations: list[int | None] = field(default_factory=list)


@dataclass
class ExperimentResult:
    summaries: dict[str, TreatmentSummary]
    gen_stats: dict[str, list[GenStats]]
    runs: dict[str, list[RunResult]]


def _padded(history: list[GenerationRecord], generations: int) -> list[GenerationRecord]:
    return [history[min(g, len(history) - 1)] for g in range(generations + 1)]


def aggregate(treatment: str, results: list[RunResult], generations: int
              ) -> tuple[TreatmentSummary, list[GenStats]]:
    gen_stats = []
    padded = [_padded(r.history, generations) for r in results]
    for g in range(generations + 1):
        recs = [p[g] for p in padded]
        freqs = [r.symbol_frequencies() for r in recs]
        symbols = {s: float(np.mean([f[s] for f in freqs])) for s in SYMBOLS}
        lengths: Counter = Counter()
        for r in results:
            if g < len(r.history):
                lengths.update(r.history[g].expressed_lengths)
        lm, ls = counter_stats(lengths) if lengths else (math.nan, math.nan)
        gen_stats.append(GenStats(g, float(np.mean([r.best_fitness for r in recs])),
                                  symbols, lm, ls))
    successes = sum(r.success for r in results)
    lo, hi = binomial_ci(successes, len(results))
    expressed: Counter = Counter()
    maxima: Counter = Counter()
    for r in results:
        expressed.update(r.expressed_lengths())
        maxima.update(r.max_lengths())
    lm, ls = counter_stats(expressed) if expressed else (math.nan, math.nan)
    mm, ms = counter_stats(maxima) if maxima else (math.nan, math.nan)
    summary = TreatmentSummary(treatment, len(results), successes, lo, hi, lm, ls, mm, ms,
                               [r.success_generation for r in results])
    return summary, gen_stats


def _run_one(cfg: EvoConfig) -> RunResult:
    return run(cfg, keep_population=False)


def run_experiment(spec: ExperimentSpec, jobs: int = 1, progress=None) -> ExperimentResult:
    """Run every treatment over the shared seed list, aggregate, and write CSVs."""
    spec.validate()
    tasks = [(t, i, spec.config_for(t, seed))
             for t in spec.treatments for i, seed in enumerate(spec.seeds())]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_run_one, [cfg for _, _, cfg in tasks]))
    else:
        outputs = []
        for t, i, cfg in tasks:
            outputs.append(_run_one(cfg))
            if progress is not None:
                progress(t.name, i, outputs[-1])
    runs: dict[str, list[RunResult]] = {t.name: [] for t in spec.treatments}
    for (t, _, _), res in zip(tasks, outputs):
        runs[t.name].append(res)
    summaries, gen_stats = {}, {}
    for name, results in runs.items():
        summaries[name], gen_stats[name] = aggregate(name, results, spec.evo.generations)
    result = ExperimentResult(summaries, gen_stats, runs)
    if spec.output_dir is not None:
        write_outputs(result, spec, Path(spec.output_dir))
    return result


def write_csv(path: Path, header: list[str], rows: Iterable[list]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, float) else v for v in row])


def write_outputs(result: ExperimentResult, spec: ExperimentSpec, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    gens = spec.evo.generations
    seeds = spec.seeds()
    write_csv(out / "fitness_by_generation.csv",
               ["treatment", "replication", "generation", "best_fitness"],
               ([name, i, g, rec.best_fitness]
                for name, rs in result.runs.items()
                for i, r in enumerate(rs)
                for g, rec in enumerate(_padded(r.history, gens))))
    write_csv(out / "symbols_by_generation.csv",
               ["treatment", "generation", *SYMBOL_COLUMNS.values()],
               ([name, gs.generation, *(gs.symbols[s] for s in SYMBOLS)]
                for name, stats_ in result.gen_stats.items() for gs in stats_))
    write_csv(out / "lengths_by_generation.csv",
               ["treatment", "generation", "len_mean", "len_std"],
               ([name, gs.generation, gs.len_mean, gs.len_std]
                for name, stats_ in result.gen_stats.items() for gs in stats_))
    write_csv(out / "runs.csv",
               ["treatment", "replication", "seed", "success", "success_generation",
                "generations_run"],
               ([name, i, seeds[i], int(r.success),
                 "" if r.success_generation is None else r.success_generation,
                 len(r.history) - 1]
                for name, rs in result.runs.items() for i, r in enumerate(rs)))
    for fname, getter in (("lengths.csv", RunResult.expressed_lengths),
                          ("max_lengths.csv", RunResult.max_lengths)):
        rows = []
        for name, rs in result.runs.items():
            pooled: Counter = Counter()
            for r in rs:
                pooled.update(getter(r))
            rows.extend([name, n, pooled[n]] for n in sorted(pooled))
        write_csv(out / fname, ["treatment", "length", "count"], rows)
    write_summary(result.summaries.values(), out / "summary.csv")


SUMMARY_HEADER = ["treatment", "replications", "successes", "ci_low", "ci_high",
                  "len_mean", "len_std", "max_len_mean", "max_len_std"]


def write_summary(summaries: Iterable[TreatmentSummary], path: Path) -> None:
    write_csv(path, SUMMARY_HEADER,
               ([s.treatment, s.replications, s.successes, s.ci_low, s.ci_high,
                 s.len_mean, s.len_std, s.max_len_mean, s.max_len_std] for s in summaries))


def _read_csv(path: Path) -> list[dict[str, str]]:
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


def _is_fixed_length(treatment: str) -> bool:
    grammar = treatment.partition("@")[2]
    try:
        g = load_grammar(grammar)
    except (OSError, ValueError):
        return "fixed" in grammar
    return not math.isinf(g.max_depth(g.start))


def report(in_dir: str | Path) -> list[TreatmentSummary]:
    """Rebuild summary.csv and plot-ready fig7..fig10 CSVs from a sweep directory."""
    d = Path(in_dir)
    runs = _read_csv(d / "runs.csv")
    order: list[str] = []
    for row in runs:
        if row["treatment"] not in order:
            order.append(row["treatment"])

    def pooled(fname):
        out = {name: Counter() for name in order}
        for row in _read_csv(d / fname):
            out[row["treatment"]][int(row["length"])] += int(row["count"])
        return out

    lengths, maxima = pooled("lengths.csv"), pooled("max_lengths.csv")
    summaries = []
    for name in order:
        rows = [r for r in runs if r["treatment"] == name]
        succ = sum(int(r["success"]) for r in rows)
        lo, hi = binomial_ci(succ, len(rows))
        lm, ls = counter_stats(lengths[name]) if lengths[name] else (math.nan, math.nan)
        mm, ms = counter_stats(maxima[name]) if maxima[name] else (math.nan, math.nan)
        summaries.append(TreatmentSummary(
            name, len(rows), succ, lo, hi, lm, ls, mm, ms,
            [int(r["success_generation"]) if r["success_generation"] else None for r in rows]))
    write_summary(summaries, d / "summary.csv")

    best: dict[str, dict[int, list[float]]] = {name: {} for name in order}
    for row in _read_csv(d / "fitness_by_generation.csv"):
        best[row["treatment"]].setdefault(int(row["generation"]), []).append(
            float(row["best_fitness"]))
    fixed = {name: _is_fixed_length(name) for name in order}
    fig_rows: dict[str, list[list]] = {f"fig{k}": [] for k in (7, 8, 9, 10)}
    for name in order:
        strategy = name.partition("@")[0]
        if fixed[name]:
            fig = "fig7"
        elif strategy in ("nolearning", "rollouts", "asocial"):
            fig = "fig9"
        else:
            fig = "fig10"
        for g in sorted(best[name]):
            fig_rows[fig].append([name, g, float(np.mean(best[name][g]))])
    for row in _read_csv(d / "symbols_by_generation.csv"):
        if fixed.get(row["treatment"]):
            for sym, col in SYMBOL_COLUMNS.items():
                fig_rows["fig8"].append([f"{row['treatment']}:{sym}", int(row["generation"]),
                                         float(row[col])])
    for fig, rows in fig_rows.items():
        write_csv(d / f"{fig}.csv", ["series", "x", "y"], rows)
    return summaries
