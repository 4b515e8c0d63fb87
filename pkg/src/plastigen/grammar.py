"""BNF grammar parsing with typed symbols.

Rules are written one per line as ``<lhs> ::= alt1 | alt2 | ...``. Symbols
inside a production may be whitespace separated or run together
(``<s><s>``, ``~<phenome>``). Two symbols carry special meaning:

``?``  content plasticity, resolved to ``0``/``1`` during learning.
``~``  structural plasticity, expanded to one or more ``?`` during learning.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


class GrammarError(ValueError):
    """Base class for grammar problems."""


class MalformedRule(GrammarError):
    pass


class EmptyProduction(GrammarError):
    pass


class UndefinedNonterminal(GrammarError):
    pass


class NonTerminating(GrammarError):
    pass


class SymbolKind(enum.Enum):
    TERMINAL = "terminal"
    NONTERMINAL = "nonterminal"
    PLASTIC_CONTENT = "plastic_content"
    PLASTIC_STRUCTURAL = "plastic_structural"


@dataclass(frozen=True)
class Symbol:
    kind: SymbolKind
    text: str

    @classmethod
    def classify(cls, token: str) -> "Symbol":
        if token == "?":
            return cls(SymbolKind.PLASTIC_CONTENT, token)
        if token == "~":
            return cls(SymbolKind.PLASTIC_STRUCTURAL, token)
        if token.startswith("<") and token.endswith(">"):
            return cls(SymbolKind.NONTERMINAL, token)
        return cls(SymbolKind.TERMINAL, token)

    @property
    def is_nonterminal(self) -> bool:
        return self.kind is SymbolKind.NONTERMINAL

    @property
    def is_plastic(self) -> bool:
        return self.kind in (SymbolKind.PLASTIC_CONTENT, SymbolKind.PLASTIC_STRUCTURAL)


Production = tuple[Symbol, ...]


@dataclass(frozen=True)
class Rule:
    lhs: str
    productions: tuple[Production, ...]


# `?` and `~` always stand alone, even when glued to neighbours.
_TOKEN_RE = re.compile(r"<[^<>\s|]+>|[?~]|[^\s<>|?~]+")
_LHS_RE = re.compile(r"^\s*(<[^<>\s|]+>)\s*$")


def _tokenize(alternative: str) -> Production:
    stripped = alternative.strip()
    tokens = _TOKEN_RE.findall(stripped)
    if "".join(tokens) != "".join(stripped.split()):
        raise MalformedRule(f"unbalanced angle brackets in {alternative!r}")
    return tuple(Symbol.classify(t) for t in tokens)


class Grammar:
    """An ordered rule table. Immutable once built.

    ``rules`` maps each nonterminal (including the angle brackets) to its
    :class:`Rule`; ``start`` is the first rule of the source text.
    """

    def __init__(self, rules: dict[str, Rule]):
        if not rules:
            raise MalformedRule("grammar defines no rules")
        self.rules = dict(rules)
        self.start = next(iter(self.rules))
        for rule in self.rules.values():
            for prod in rule.productions:
                for sym in prod:
                    if sym.is_nonterminal and sym.text not in self.rules:
                        raise UndefinedNonterminal(
                            f"{sym.text} is used in {rule.lhs} but never defined")
        self._min_depth = self._compute_min_depths()
        self._max_depth = self._compute_max_depths()
        if math.isinf(self._min_depth[self.start]):
            raise NonTerminating(f"start rule {self.start} never terminates")

    def __eq__(self, other):
        if not isinstance(other, Grammar):
            return NotImplemented
        return list(self.rules.items()) == list(other.rules.items())

    def __repr__(self):
        return f"Grammar(start={self.start!r}, rules={len(self.rules)})"

    def production_count(self, nt: str) -> int:
        return len(self._rule(nt).productions)

    def productions(self, nt: str) -> tuple[Production, ...]:
        return self._rule(nt).productions

    def min_depth(self, nt: str) -> int:
        """Smallest derivation-tree depth that fully expands ``nt``.

        Depth counts nonterminal levels, so a rule that rewrites directly to
        terminals or plastic symbols has depth 1.
        """
        depth = self._min_depth[self._rule(nt).lhs]
        if math.isinf(depth):
            raise NonTerminating(f"{nt} has no finite expansion")
        return int(depth)

    def max_depth(self, nt: str) -> float:
        """Deepest derivation reachable from ``nt``; ``math.inf`` if recursive."""
        return self._max_depth[self._rule(nt).lhs]

    def production_min_depth(self, nt: str, index: int) -> float:
        return _production_depth(self.productions(nt)[index], self._min_depth)

    def production_max_depth(self, nt: str, index: int) -> float:
        return _production_depth(self.productions(nt)[index], self._max_depth)

    def symbol_kinds(self) -> set[SymbolKind]:
        """Kinds of every symbol appearing on a right-hand side."""
        return {sym.kind for rule in self.rules.values()
                for prod in rule.productions for sym in prod}

    def has_kind(self, kind: SymbolKind) -> bool:
        return kind in self.symbol_kinds()

    def to_bnf(self) -> str:
        lines = []
        for rule in self.rules.values():
            alts = " | ".join(" ".join(s.text for s in prod) for prod in rule.productions)
            lines.append(f"{rule.lhs} ::= {alts}")
        return "\n".join(lines) + "\n"

    def _rule(self, nt: str) -> Rule:
        key = nt if nt.startswith("<") else f"<{nt}>"
        try:
            return self.rules[key]
        except KeyError:
            raise UndefinedNonterminal(f"{nt} is not defined") from None

    def _compute_min_depths(self) -> dict[str, float]:
        depth = {nt: math.inf for nt in self.rules}
        changed = True
        while changed:
            changed = False
            for nt, rule in self.rules.items():
                best = min(_production_depth(p, depth) for p in rule.productions)
                if best < depth[nt]:
                    depth[nt] = best
                    changed = True
        return depth

    def _compute_max_depths(self) -> dict[str, float]:
        reach = {nt: self._reachable(nt) for nt in self.rules}
        cyclic = {nt for nt in self.rules if nt in reach[nt]}
        out: dict[str, float] = {}

        def visit(nt: str) -> float:
            if nt not in out:
                if nt in cyclic or reach[nt] & cyclic:
                    out[nt] = math.inf
                else:
                    out[nt] = max(_production_depth(p, {s.text: visit(s.text)
                                                        for s in p if s.is_nonterminal})
                                  for p in self.rules[nt].productions)
            return out[nt]

        for nt in self.rules:
            visit(nt)
        return out

    def _reachable(self, nt: str) -> set[str]:
        seen: set[str] = set()
        stack = [nt]
        while stack:
            for prod in self.rules[stack.pop()].productions:
                for s in prod:
                    if s.is_nonterminal and s.text not in seen:
                        seen.add(s.text)
                        stack.append(s.text)
        return seen


def _production_depth(prod: Production, table: dict[str, float]) -> float:
    children = [table[s.text] for s in prod if s.is_nonterminal]
    return 1 + max(children, default=0)


def parse_grammar(text: str) -> Grammar:
    """Parse BNF source into a :class:`Grammar`, preserving rule and production order."""
    if not text or not text.strip():
        raise MalformedRule("empty grammar text")
    rules: dict[str, Rule] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if "::=" not in line:
            raise MalformedRule(f"line {lineno}: missing '::='")
        head, body = line.split("::=", 1)
        m = _LHS_RE.match(head)
        if m is None:
            raise MalformedRule(f"line {lineno}: left-hand side must be a single <nonterminal>")
        lhs = m.group(1)
        if lhs in rules:
            raise MalformedRule(f"line {lineno}: {lhs} defined twice")
        productions = []
        for alt in body.split("|"):
            prod = _tokenize(alt)
            if not prod:
                raise EmptyProduction(f"line {lineno}: empty alternative in {lhs}")
            productions.append(prod)
        rules[lhs] = Rule(lhs, tuple(productions))
    return Grammar(rules)


SHIPPED_GRAMMARS = (
    "fixed_nolearning.bnf",
    "fixed_plastic.bnf",
    "variable_nolearning.bnf",
    "variable_plastic.bnf",
    "variable_expansion.bnf",
)


def grammar_text(name: str) -> str:
    """Source text of a shipped grammar, or of a file on disk."""
    path = Path(name)
    if path.is_file():
        return path.read_text()
    fname = name if name.endswith(".bnf") else f"{name}.bnf"
    res = resources.files("plastigen").joinpath("grammars").joinpath(fname)
    if not res.is_file():
        raise FileNotFoundError(f"no grammar file or shipped grammar named {name!r}")
    return res.read_text()


def load_grammar(name: str) -> Grammar:
    return parse_grammar(grammar_text(name))
