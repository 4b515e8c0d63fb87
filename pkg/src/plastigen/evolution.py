"""Generational GE with elitism, tournament selection and lifetime learning."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, fields

import numpy as np

from .grammar import Grammar, SymbolKind, load_grammar
from .landscape import FitnessParams
from .learning import (LENGTH_CAP, STRATEGIES, SocialBoard, TrialRecord, board_update,
                       evaluate)
from .mapper import (Genome, MapOutcome, crossover_variable_onepoint, map_genome, mutate_int,
                     pigrow_init)

SYMBOLS = ("1", "0", "?", "~")


class ConfigError(ValueError):
    pass


class UnevaluatedPopulation(RuntimeError):
    pass


@dataclass
class EvoConfig:
    population_size: int = 1000
    generations: int = 50
    crossover_probability: float = 0.9
    tournament_size: int = 2
    elites: int = 10
    max_init_depth: int = 10
    max_depth: int = 50
    learning_trials: int = 1000
    target_length: int = 20
    length_cap: int = LENGTH_CAP
    strategy: str = "asocial"
    grammar: str = "fixed_plastic.bnf"
    seed: int = 0
    stop_on_success: bool = True

    def validate(self) -> Grammar:
        """Check values and strategy/grammar compatibility; return the parsed grammar."""
        for name in ("population_size", "generations", "tournament_size", "max_init_depth",
                     "max_depth", "learning_trials", "target_length", "length_cap"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if not 0 <= self.elites <= self.population_size:
            raise ConfigError("elites must lie in [0, population_size]")
        if not 0.0 <= self.crossover_probability <= 1.0:
            raise ConfigError("crossover_probability must lie in [0, 1]")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}; choose from {STRATEGIES}")
        if self.strategy == "tabulist" and self.length_cap > 128:
            raise ConfigError("tabulist supports length_cap <= 128")
        try:
            grammar = load_grammar(self.grammar)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"grammar {self.grammar!r}: {exc}") from exc
        content = grammar.has_kind(SymbolKind.PLASTIC_CONTENT)
        structural = grammar.has_kind(SymbolKind.PLASTIC_STRUCTURAL)
        if self.strategy in ("nolearning", "rollouts") and (content or structural):
            raise ConfigError(f"{self.strategy} needs a grammar without plastic symbols")
        if self.strategy == "asocial" and structural:
            raise ConfigError("asocial learning cannot resolve '~'; use plastic_expansion")
        if self.strategy in ("plastic_expansion", "social") and not structural:
            raise ConfigError(f"{self.strategy} needs a grammar with '~' symbols")
        return grammar

    @property
    def params(self) -> FitnessParams:
        return FitnessParams(L=self.target_length, T=self.learning_trials)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


@dataclass
class Individual:
    genome: Genome
    outcome: MapOutcome | None = None
    record: TrialRecord | None = None
    fitness: float | None = None

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None


@dataclass
class Population:
    individuals: list[Individual]
    generation: int = 0

    def __len__(self):
        return len(self.individuals)

    def best_fitness(self) -> float:
        return min(ind.fitness for ind in self.individuals)


@dataclass
class GenerationRecord:
    generation: int
    best_fitness: float
    symbol_counts: Counter
    expressed_lengths: Counter
    max_lengths: Counter
    found: bool

    def symbol_frequencies(self) -> dict[str, float]:
        total = sum(self.symbol_counts[s] for s in SYMBOLS)
        if total == 0:
            return {s: math.nan for s in SYMBOLS}
        return {s: self.symbol_counts[s] / total for s in SYMBOLS}


@dataclass
class RunResult:
    config: EvoConfig
    history: list[GenerationRecord] = field(default_factory=list)
    success: bool = False
    success_generation: int | None = None
    final_population: Population | None = None

    @property
    def best_fitness(self) -> list[float]:
        return [g.best_fitness for g in self.history]

    def expressed_lengths(self) -> Counter:
        total: Counter = Counter()
        for g in self.history:
            total.update(g.expressed_lengths)
        return total

    def max_lengths(self) -> Counter:
        total: Counter = Counter()
        for g in self.history:
            total.update(g.max_lengths)
        return total


def tournament_select(pop: Population, rng: np.random.Generator, size: int = 2) -> Individual:
    """Best of ``size`` uniform draws with replacement; ties broken at random."""
    inds = pop.individuals
    picks = rng.integers(len(inds), size=size)
    fits = []
    for i in picks:
        f = inds[i].fitness
        if f is None:
            raise UnevaluatedPopulation("tournament over an unevaluated individual")
        fits.append(f)
    best = min(fits)
    winners = [i for i, f in zip(picks, fits) if f == best]
    if len(winners) == 1:
        return inds[winners[0]]
    return inds[winners[int(rng.integers(len(winners)))]]


class Engine:
    """Holds the per-run state shared across generations."""

    def __init__(self, cfg: EvoConfig, grammar: Grammar | None = None):
        self.cfg = cfg
        self.grammar = grammar if grammar is not None else cfg.validate()
        self.params = cfg.params
        self.board = SocialBoard()
        self.found = False

    def evaluate(self, ind: Individual, rng: np.random.Generator, generation: int) -> None:
        ind.outcome = map_genome(ind.genome, self.grammar, self.cfg.max_depth)
        if not ind.outcome.ok:
            ind.record = None
            ind.fitness = self.params.worst
            return
        strategy = self.cfg.strategy
        if strategy == "social" and generation == 0:
            # no best length exists yet while the first generation is evaluated
            strategy = "plastic_expansion"
        ind.record = evaluate(strategy, ind.outcome.phenome, self.params, rng,
                              self.board, self.cfg.length_cap)
        ind.fitness = ind.record.fitness(self.params)
        if ind.record.found:
            self.found = True
        if self.cfg.strategy == "social":
            board_update(self.board, ind.fitness, ind.record.max_expressed_length)

    def initial_population(self, rng: np.random.Generator) -> Population:
        inds = [Individual(pigrow_init(self.grammar, self.cfg.max_init_depth, rng))
                for _ in range(self.cfg.population_size)]
        for ind in inds:
            self.evaluate(ind, rng, 0)
        return Population(inds, 0)

    def step(self, pop: Population, rng: np.random.Generator) -> Population:
        cfg = self.cfg
        if any(not ind.evaluated for ind in pop.individuals):
            raise UnevaluatedPopulation("step_generation needs an evaluated population")
        order = sorted(range(len(pop)), key=lambda i: (pop.individuals[i].fitness, i))
        nxt = [pop.individuals[i] for i in order[:cfg.elites]]
        gen = pop.generation + 1
        children: list[Individual] = []
        n_children = cfg.population_size - len(nxt)
        while len(children) < n_children:
            a = tournament_select(pop, rng, cfg.tournament_size).genome
            b = tournament_select(pop, rng, cfg.tournament_size).genome
            if rng.random() < cfg.crossover_probability:
                c1, c2 = crossover_variable_onepoint(a, b, rng)
                # mutation works on the used region, so learn it first
                map_genome(c1, self.grammar, cfg.max_depth)
                map_genome(c2, self.grammar, cfg.max_depth)
            else:
                c1, c2 = a.copy(), b.copy()
            children.append(Individual(mutate_int(c1, rng)))
            if len(children) < n_children:
                children.append(Individual(mutate_int(c2, rng)))
        for child in children:
            self.evaluate(child, rng, gen)
        return Population(nxt + children, gen)


def _generation_record(pop: Population, fresh: list[Individual]) -> GenerationRecord:
    symbols: Counter = Counter()
    for ind in pop.individuals:
        if ind.outcome is not None and ind.outcome.ok:
            symbols.update(ind.outcome.phenome.text)
    lengths: Counter = Counter()
    maxima: Counter = Counter()
    found = False
    for ind in fresh:
        if ind.record is not None:
            lengths.update(ind.record.expressed_lengths)
            maxima[ind.record.max_expressed_length] += 1
            found = found or ind.record.found
    return GenerationRecord(pop.generation, pop.best_fitness(), symbols, lengths, maxima, found)


def step_generation(pop: Population, cfg: EvoConfig, board: SocialBoard,
                    rng: np.random.Generator, grammar: Grammar | None = None) -> Population:
    """One generation: elites copied, the rest bred, mutated, mapped and evaluated."""
    engine = Engine(cfg, grammar)
    engine.board = board
    return engine.step(pop, rng)


def run(cfg: EvoConfig, rng: np.random.Generator | None = None, keep_population: bool = True,
        on_generation=None) -> RunResult:
    """Run one replication. Deterministic for a given ``cfg.seed`` when ``rng`` is omitted.

    With ``cfg.stop_on_success`` the run ends after the generation in which
    the target was first expressed.
    """
    engine = Engine(cfg)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    result = RunResult(cfg)
    pop = engine.initial_population(rng)
    fresh = pop.individuals
    while True:
        rec = _generation_record(pop, fresh)
        result.history.append(rec)
        if on_generation is not None:
            on_generation(rec)
        if rec.found and not result.success:
            result.success = True
            result.success_generation = pop.generation
        if pop.generation >= cfg.generations or (result.success and cfg.stop_on_success):
            break
        pop = engine.step(pop, rng)
        fresh = pop.individuals[cfg.elites:]
    if keep_population:
        result.final_population = pop
    return result
