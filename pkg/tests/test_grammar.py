import math
import pytest

from plastigen.grammar import (SHIPPED_GRAMMARS, EmptyProduction, MalformedRule, NonTerminating,
                               SymbolKind, UndefinedNonterminal, load_grammar, parse_grammar)


def shortest_depth(g, nt, limit=12):
    """Iterative-deepening oracle: smallest d such that nt completes within depth d."""

    def fits(sym, d):
        if d < 1:
            return False
        return any(all(fits(c.text, d - 1) for c in prod if c.is_nonterminal)
                   for prod in g.productions(sym))

    return next((d for d in range(1, limit + 1) if fits(nt, d)), math.inf)


@pytest.mark.parametrize("name, nt, count", [
    ("fixed_nolearning", "<s>", 2),
    ("fixed_plastic", "<s>", 4),
    ("variable_plastic", "<phenome>", 2),
    ("variable_expansion", "<phenome>", 4),
    ("fixed_nolearning", "<one>", 1),
])
def test_production_counts(name, nt, count):
    assert load_grammar(name).production_count(nt) == count


def test_fixed_nolearning_has_four_rules_and_twenty_slots():
    g = load_grammar("fixed_nolearning")
    assert list(g.rules) == ["<phenome>", "<s>", "<one>", "<zero>"]
    assert len(g.productions("<phenome>")[0]) == 20


def test_duplicate_question_marks_kept():
    prods = load_grammar("fixed_plastic").productions("<s>")
    assert sum(1 for p in prods if [s.text for s in p] == ["?"]) == 2


def test_symbol_classification():
    g = parse_grammar("<a> ::= <b> ? ~ x\n<b> ::= 1")
    kinds = [s.kind for s in g.productions("<a>")[0]]
    assert kinds == [SymbolKind.NONTERMINAL, SymbolKind.PLASTIC_CONTENT,
                     SymbolKind.PLASTIC_STRUCTURAL, SymbolKind.TERMINAL]


def test_multicharacter_terminal():
    g = parse_grammar("<a> ::= abc | <a> abc")
    assert [s.text for s in g.productions("<a>")[0]] == ["abc"]


@pytest.mark.parametrize("text, exc", [
    ("<a> ::= <b>", UndefinedNonterminal),
    ("<a> ::= 1 | ", EmptyProduction),
    ("<a> 1", MalformedRule),
    ("", MalformedRule),
    ("<a> ::= <a>", NonTerminating),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_grammar(text)


def test_undefined_lookup():
    with pytest.raises(UndefinedNonterminal):
        load_grammar("fixed_plastic").production_count("<nope>")


@pytest.mark.parametrize("name", SHIPPED_GRAMMARS)
def test_round_trip(name):
    g = load_grammar(name)
    assert parse_grammar(g.to_bnf()) == g


@pytest.mark.parametrize("name", SHIPPED_GRAMMARS)
def test_min_depth_matches_brute_force(name):
    g = load_grammar(name)
    for nt in g.rules:
        assert g.min_depth(nt) == shortest_depth(g, nt), nt


@pytest.mark.parametrize("name, nt, depth", [
    ("variable_plastic", "<one>", 1),
    ("variable_plastic", "<s>", 1),
    ("fixed_nolearning", "<phenome>", 3),
    ("variable_expansion", "<phenome>", 1),
])
def test_min_depth_examples(name, nt, depth):
    assert load_grammar(name).min_depth(nt) == depth


def test_max_depth():
    assert load_grammar("fixed_nolearning").max_depth("<phenome>") == 3
    assert math.isinf(load_grammar("variable_nolearning").max_depth("<phenome>"))


def test_grammar_file_path(tmp_path):
    path = tmp_path / "g.bnf"
    path.write_text("<p> ::= 1 | 0\n")
    assert load_grammar(str(path)).production_count("<p>") == 2
