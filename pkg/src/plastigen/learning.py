"""Lifetime learning: turning a phenome into up to ``T`` phenotypes.

Six strategies are available by name:

``nolearning``         the phenome is evaluated as-is.
``rollouts``           random local search: each trial flips every locus with
                       probability ``1/len`` (plastic-free phenomes only).
``asocial``            every ``?`` is resolved to a uniform random bit per trial.
``plastic_expansion``  each ``~`` first grows into Geometric(1/2) ``?``s, per trial.
``tabulist``           as plastic_expansion, but a phenotype already expressed
                       in this lifetime is regenerated up to 10 times.
``social``             each ``~`` is sized from the length shared by the best
                       individual so far (``PL' = PL + |MPL - IPL|``).

Learning is Baldwinian: nothing here modifies the genome or phenome.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .grammar import Symbol, SymbolKind
from .landscape import NOT_FOUND, FitnessParams, fitness_from_trials
from .mapper import Phenome

LENGTH_CAP = 100
TABU_RETRIES = 10
STRATEGIES = ("nolearning", "rollouts", "asocial", "plastic_expansion", "tabulist", "social")

_QMARK = Symbol(SymbolKind.PLASTIC_CONTENT, "?")


class LearningError(ValueError):
    pass


class PlasticInNoLearning(LearningError):
    pass


class StructuralPlasticUnsupported(LearningError):
    pass


@dataclass
class TrialRecord:
    trials_taken: int | None
    best_phenotype: str
    expressed_lengths: Counter = field(default_factory=Counter)

    @property
    def found(self) -> bool:
        return self.trials_taken is not NOT_FOUND

    @property
    def max_expressed_length(self) -> int:
        return max(self.expressed_lengths, default=0)

    @property
    def n_expressed(self) -> int:
        return sum(self.expressed_lengths.values())

    def fitness(self, params: FitnessParams) -> float:
        return fitness_from_trials(self.trials_taken, params)


@dataclass
class SocialBoard:
    """Run-wide record of the best fitness seen and its owner's max expressed length."""

    best_fitness_so_far: float = math.inf
    mpl: int = 0
    initialized: bool = False


@dataclass
class TabuMemory:
    seen: set[str] = field(default_factory=set)
    retry_limit: int = TABU_RETRIES


def _codes(ph: Phenome) -> np.ndarray:
    text = ph.text
    if len(text) != len(ph.symbols) or set(text) - {"0", "1", "?", "~"}:
        raise LearningError(f"learning needs a phenome over 0/1/?/~, got {text!r}")
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8)


def _target(params: FitnessParams) -> np.ndarray:
    return np.frombuffer(params.target.encode("ascii"), dtype=np.uint8) - K.ZERO


_NO_KEYS = (np.zeros(0, np.int64), np.zeros(0, np.uint64), np.zeros(0, np.uint64))


def _run(ph, params, rng, mode, cap=LENGTH_CAP, mpl=0, retry_limit=-1, keys=_NO_KEYS):
    seed = int(rng.integers(2**32))
    t, hist, last, tlen, tw0, tw1 = K.run_trials(
        _codes(ph), _target(params), params.T, cap, mode, mpl, retry_limit, seed, *keys)
    lengths = Counter({int(n): int(hist[n]) for n in np.flatnonzero(hist)})
    record = TrialRecord(None if t < 0 else int(t),
                         "".join("1" if b else "0" for b in last), lengths)
    return record, (tlen, tw0, tw1)


def _already_target(ph: Phenome, params: FitnessParams) -> TrialRecord | None:
    if ph.text == params.target:
        return TrialRecord(0, ph.text, Counter({len(ph): 1}))
    return None


def evaluate_nolearning(ph: Phenome, params: FitnessParams, rng=None) -> TrialRecord:
    if ph.is_plastic:
        raise PlasticInNoLearning(f"plastic symbol in {ph.text!r}")
    return _already_target(ph, params) or TrialRecord(NOT_FOUND, ph.text, Counter({len(ph): 1}))


def evaluate_rollouts(ph: Phenome, params: FitnessParams, rng: np.random.Generator) -> TrialRecord:
    if ph.is_plastic:
        raise PlasticInNoLearning(f"plastic symbol in {ph.text!r}")
    done = _already_target(ph, params)
    if done:
        return done
    return _run(ph, params, rng, K.ROLLOUT)[0]


def evaluate_asocial(ph: Phenome, params: FitnessParams, rng: np.random.Generator) -> TrialRecord:
    if ph.count(SymbolKind.PLASTIC_STRUCTURAL):
        raise StructuralPlasticUnsupported(f"'~' in {ph.text!r}")
    done = _already_target(ph, params)
    if done:
        return done
    if "0" in ph.text or len(ph) != params.L:
        # no resolution can remove a literal 0 or change the length
        q = ph.count(SymbolKind.PLASTIC_CONTENT)
        bits = iter(rng.integers(2, size=q).tolist())
        last = "".join(str(next(bits)) if ch == "?" else ch for ch in ph.text)
        return TrialRecord(NOT_FOUND, last, Counter({len(ph): params.T}))
    return _run(ph, params, rng, K.RESOLVE)[0]


def expand_structural(ph: Phenome, rng: np.random.Generator, cap: int = LENGTH_CAP) -> Phenome:
    """Rewrite every ``~`` as ``?`` followed by further ``?`` with probability 1/2 each.

    Each ``~`` yields at least one ``?``; growth beyond that stops once the
    phenome would exceed ``cap`` symbols.
    """
    budget = max(cap - len(ph), 0)
    out: list[Symbol] = []
    for sym in ph.symbols:
        if sym.kind is not SymbolKind.PLASTIC_STRUCTURAL:
            out.append(sym)
            continue
        out.append(_QMARK)
        while budget > 0 and rng.random() < 0.5:
            out.append(_QMARK)
            budget -= 1
    return Phenome(tuple(out), ph.depth)


def social_expand(ph: Phenome, board: SocialBoard, ipl_so_far: int,
                  rng: np.random.Generator | None = None, cap: int = LENGTH_CAP) -> Phenome:
    """Resize ``ph`` to ``PL + |MPL - IPL|`` symbols by expanding its ``~``s into ``?``s.

    Extra ``?``s are dealt round-robin across the ``~`` positions, left to right.
    The result never exceeds ``max(cap, PL)`` symbols.
    """
    n_tilde = ph.count(SymbolKind.PLASTIC_STRUCTURAL)
    if n_tilde == 0:
        return ph
    extra = min(abs(board.mpl - ipl_so_far), max(cap - len(ph), 0))
    base, rem = divmod(extra, n_tilde)
    out: list[Symbol] = []
    k = 0
    for sym in ph.symbols:
        if sym.kind is SymbolKind.PLASTIC_STRUCTURAL:
            out.extend([_QMARK] * (1 + base + (k < rem)))
            k += 1
        else:
            out.append(sym)
    return Phenome(tuple(out), ph.depth)


def evaluate_plastic_expansion(ph: Phenome, params: FitnessParams, rng: np.random.Generator,
                               cap: int = LENGTH_CAP) -> TrialRecord:
    return _already_target(ph, params) or _run(ph, params, rng, K.EXPAND, cap)[0]


def _keys_from_strings(seen: set[str]):
    lens, w0s, w1s = [], [], []
    for s in seen:
        w0 = w1 = 0
        for i, ch in enumerate(s):
            if ch == "1":
                if i < 64:
                    w0 |= 1 << i
                else:
                    w1 |= 1 << (i - 64)
        lens.append(len(s))
        w0s.append(w0)
        w1s.append(w1)
    return (np.array(lens, np.int64), np.array(w0s, np.uint64), np.array(w1s, np.uint64))


def _strings_from_table(tlen, tw0, tw1) -> set[str]:
    out = set()
    for slot in np.flatnonzero(tlen >= 0):
        n, w0, w1 = int(tlen[slot]), int(tw0[slot]), int(tw1[slot])
        out.add("".join(
            "1" if ((w0 >> i) if i < 64 else (w1 >> (i - 64))) & 1 else "0"
            for i in range(n)))
    return out


def evaluate_tabulist(ph: Phenome, params: FitnessParams, rng: np.random.Generator,
                      memory: TabuMemory | None = None, cap: int = LENGTH_CAP) -> TrialRecord:
    """Plastic expansion with a lifetime memory of expressed phenotypes.

    A trial whose phenotype is already in ``memory.seen`` is regenerated
    (fresh expansion and resolution) up to ``memory.retry_limit`` times before
    the duplicate is accepted. ``memory`` is filled in place when given.
    """
    if cap > 128:
        raise LearningError("tabu memory packs phenotypes into 128 bits; cap must be <= 128")
    done = _already_target(ph, params)
    if done:
        if memory is not None:
            memory.seen.add(ph.text)
        return done
    if memory is None:
        memory_given, memory = False, TabuMemory()
    else:
        memory_given = True
    keys = _keys_from_strings(memory.seen) if memory.seen else _NO_KEYS
    record, table = _run(ph, params, rng, K.EXPAND, cap,
                         retry_limit=max(memory.retry_limit, 0), keys=keys)
    if memory_given:
        memory.seen = _strings_from_table(*table)
    return record


def evaluate_social(ph: Phenome, params: FitnessParams, rng: np.random.Generator,
                    board: SocialBoard, cap: int = LENGTH_CAP) -> TrialRecord:
    """Plastic expansion sized by the shared board.

    Before the board is initialised this is exactly ``evaluate_plastic_expansion``
    (same random draws). Afterwards every trial expands each ``~`` with
    :func:`social_expand`, with ``IPL`` the longest phenotype expressed so far in
    this evaluation (0 before the first trial).
    """
    if not board.initialized:
        return evaluate_plastic_expansion(ph, params, rng, cap)
    return _already_target(ph, params) or _run(ph, params, rng, K.SOCIAL, cap, mpl=board.mpl)[0]


def board_update(board: SocialBoard, fitness: float, max_expressed_length: int) -> SocialBoard:
    """Adopt a strictly better fitness and its owner's max expressed length (in place)."""
    if fitness < board.best_fitness_so_far:
        board.best_fitness_so_far = fitness
        board.mpl = int(max_expressed_length)
        board.initialized = True
    return board


def evaluate(strategy: str, ph: Phenome, params: FitnessParams, rng: np.random.Generator,
             board: SocialBoard | None = None, cap: int = LENGTH_CAP) -> TrialRecord:
    """Dispatch to a strategy by name."""
    if strategy == "nolearning":
        return evaluate_nolearning(ph, params)
    if strategy == "rollouts":
        return evaluate_rollouts(ph, params, rng)
    if strategy == "asocial":
        return evaluate_asocial(ph, params, rng)
    if strategy == "plastic_expansion":
        return evaluate_plastic_expansion(ph, params, rng, cap)
    if strategy == "tabulist":
        return evaluate_tabulist(ph, params, rng, cap=cap)
    if strategy == "social":
        if board is None:
            raise LearningError("social learning needs a SocialBoard")
        return evaluate_social(ph, params, rng, board, cap)
    raise LearningError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
