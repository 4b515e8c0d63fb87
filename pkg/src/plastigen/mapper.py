"""Linear integer genomes and the genotype -> phenome mapping.

Mapping follows the usual GE mod rule: expand the leftmost nonterminal,
and where a rule offers more than one production consume the next codon
and take ``codon % n_productions``. Codons are never reused (no wrapping).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .grammar import Grammar, GrammarError, Symbol, SymbolKind

CODON_MAX = 255


class InfeasibleDepth(GrammarError):
    pass


@dataclass
class Genome:
    codons: list[int]
    used_length: int = 0

    def __post_init__(self):
        self.codons = [int(c) for c in self.codons]
        if not self.codons:
            raise ValueError("genome must hold at least one codon")
        if min(self.codons) < 0 or max(self.codons) > CODON_MAX:
            raise ValueError(f"codons must lie in [0, {CODON_MAX}]")
        if not 0 <= self.used_length <= len(self.codons):
            raise ValueError("used_length out of range")

    def __len__(self):
        return len(self.codons)

    def copy(self) -> "Genome":
        return Genome(list(self.codons), self.used_length)

    def to_csv_row(self) -> str:
        return ",".join(map(str, self.codons))


@dataclass(frozen=True)
class Phenome:
    symbols: tuple[Symbol, ...]
    depth: int = 0
    text: str = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if any(s.is_nonterminal for s in self.symbols):
            raise ValueError("a phenome cannot contain nonterminals")
        object.__setattr__(self, "text", "".join(s.text for s in self.symbols))

    @classmethod
    def from_text(cls, text: str, depth: int = 0) -> "Phenome":
        """Build a phenome from single-character symbols, e.g. ``"1?~0"``."""
        return cls(tuple(Symbol.classify(ch) for ch in text), depth)

    def __len__(self):
        return len(self.symbols)

    def count(self, kind: SymbolKind) -> int:
        return sum(1 for s in self.symbols if s.kind is kind)

    @property
    def is_plastic(self) -> bool:
        return any(s.is_plastic for s in self.symbols)


class MapFailure(enum.Enum):
    OUT_OF_CODONS = "out_of_codons"
    DEPTH_EXCEEDED = "depth_exceeded"


@dataclass(frozen=True)
class MapOutcome:
    phenome: Phenome | None = None
    failure: MapFailure | None = None

    def __post_init__(self):
        if (self.phenome is None) == (self.failure is None):
            raise ValueError("exactly one of phenome/failure must be set")

    @property
    def ok(self) -> bool:
        return self.phenome is not None


def map_genome(genome: Genome, grammar: Grammar, max_depth: int) -> MapOutcome:
    """Map ``genome`` through ``grammar`` and record ``genome.used_length``."""
    codons = genome.codons
    n_codons = len(codons)
    rules = grammar.rules
    pos = 0
    deepest = 0
    out: list[Symbol] = []
    stack: list[tuple[Symbol, int]] = [(Symbol(SymbolKind.NONTERMINAL, grammar.start), 1)]
    while stack:
        sym, depth = stack.pop()
        if not sym.is_nonterminal:
            out.append(sym)
            continue
        if depth > max_depth:
            genome.used_length = pos
            return MapOutcome(failure=MapFailure.DEPTH_EXCEEDED)
        if depth > deepest:
            deepest = depth
        prods = rules[sym.text].productions
        if len(prods) == 1:
            chosen = prods[0]
        else:
            if pos >= n_codons:
                genome.used_length = pos
                return MapOutcome(failure=MapFailure.OUT_OF_CODONS)
            chosen = prods[codons[pos] % len(prods)]
            pos += 1
        for child in reversed(chosen):
            stack.append((child, depth + 1))
    genome.used_length = pos
    return MapOutcome(phenome=Phenome(tuple(out), deepest))


class _Node:
    __slots__ = ("symbol", "depth", "choice", "children")

    def __init__(self, symbol: str, depth: int):
        self.symbol = symbol
        self.depth = depth
        self.choice = -1
        self.children: list[_Node | Symbol] = []


def _grow_tree(grammar: Grammar, max_depth: int, rng: np.random.Generator) -> _Node:
    start = grammar.start
    if grammar.min_depth(start) > max_depth:
        raise InfeasibleDepth(
            f"{start} needs depth {grammar.min_depth(start)} > limit {max_depth}")
    root = _Node(start, 1)
    frontier = [root]
    deepest = 0
    while frontier:
        node = frontier.pop(int(rng.integers(len(frontier))))
        deepest = max(deepest, node.depth)
        nt = node.symbol
        n_prod = grammar.production_count(nt)
        base = node.depth - 1
        options = [i for i in range(n_prod)
                   if base + grammar.production_min_depth(nt, i) <= max_depth]
        # Force a path to the depth limit once no other pending node can get there.
        if deepest < max_depth and not any(
                f.depth - 1 + grammar.max_depth(f.symbol) >= max_depth for f in frontier):
            deep = [i for i in options
                    if base + grammar.production_max_depth(nt, i) >= max_depth]
            if deep:
                options = deep
        node.choice = options[int(rng.integers(len(options)))]
        for sym in grammar.productions(nt)[node.choice]:
            if sym.is_nonterminal:
                child = _Node(sym.text, node.depth + 1)
                frontier.append(child)
                node.children.append(child)
            else:
                node.children.append(sym)
    return root


def _tree_leaves(root: _Node) -> tuple[list[Symbol], int]:
    leaves: list[Symbol] = []
    deepest = 0
    stack: list[_Node | Symbol] = [root]
    while stack:
        item = stack.pop()
        if isinstance(item, Symbol):
            leaves.append(item)
        else:
            deepest = max(deepest, item.depth)
            stack.extend(reversed(item.children))
    return leaves, deepest


def _encode_tree(root: _Node, grammar: Grammar, rng: np.random.Generator) -> list[int]:
    codons: list[int] = []
    stack: list[_Node | Symbol] = [root]
    while stack:
        item = stack.pop()
        if isinstance(item, Symbol):
            continue
        n_prod = grammar.production_count(item.symbol)
        if n_prod > 1:
            k = int(rng.integers((CODON_MAX - item.choice) // n_prod + 1))
            codons.append(item.choice + n_prod * k)
        stack.extend(reversed(item.children))
    return codons


def pigrow_init(grammar: Grammar, max_init_depth: int,
                rng: np.random.Generator) -> Genome:
    """Position-independent grow initialisation.

    Nonterminals are expanded in random order, each choosing uniformly among
    productions that still fit the depth budget. While no pending node can
    still reach ``max_init_depth`` the choice is restricted to productions
    that can, so one branch hits the limit whenever the grammar allows it.
    The finished tree is encoded back to codons in leftmost-derivation order.
    """
    genome, _ = _pigrow_with_phenome(grammar, max_init_depth, rng)
    return genome


def _pigrow_with_phenome(grammar, max_init_depth, rng) -> tuple[Genome, Phenome]:
    root = _grow_tree(grammar, max_init_depth, rng)
    codons = _encode_tree(root, grammar, rng)
    leaves, depth = _tree_leaves(root)
    if not codons:
        # grammars without choices still need a non-empty genome
        codons = [int(rng.integers(CODON_MAX + 1))]
    return Genome(codons), Phenome(tuple(leaves), depth)


def _cut(genome: Genome, rng: np.random.Generator) -> int:
    used = genome.used_length if genome.used_length else len(genome.codons)
    return int(rng.integers(used + 1))


def crossover_variable_onepoint(a: Genome, b: Genome,
                                rng: np.random.Generator) -> tuple[Genome, Genome]:
    """Swap tails after an independent cut point in each parent's used region.

    Cut pairs that would leave a child without codons are redrawn.
    """
    while True:
        ca, cb = _cut(a, rng), _cut(b, rng)
        c1 = a.codons[:ca] + b.codons[cb:]
        c2 = b.codons[:cb] + a.codons[ca:]
        if c1 and c2:
            return Genome(c1), Genome(c2)


def splice(a: Genome, b: Genome, ca: int, cb: int) -> tuple[Genome, Genome]:
    """Deterministic one-point splice at the given cut points."""
    return Genome(a.codons[:ca] + b.codons[cb:]), Genome(b.codons[:cb] + a.codons[ca:])


def mutate_int(genome: Genome, rng: np.random.Generator) -> Genome:
    """Redraw one codon, chosen uniformly from the used region."""
    region = genome.used_length or len(genome.codons)
    codons = list(genome.codons)
    codons[int(rng.integers(region))] = int(rng.integers(CODON_MAX + 1))
    return Genome(codons)
