"""
Grammars, genomes and phenomes
==============================

Parse a shipped grammar, build a genome by PIGrow and follow it through
the mod-rule mapping to a phenome.
"""

import numpy as np

from plastigen.grammar import load_grammar
from plastigen.mapper import Genome, map_genome, pigrow_init

# The content-plastic grammar lists ``?`` twice, so half of all loci start plastic.
g = load_grammar("fixed_plastic")
print(g.to_bnf())
print("productions of <s>:", g.production_count("<s>"))

# A hand-written genome: every <s> picks production 1 (<one>).
out = map_genome(Genome([1] * 20), g, max_depth=50)
print("all-ones genome ->", out.phenome.text)

# Variable-length grammar: codon 0 stops the recursion, codon 1 (mod 4) picks <one>.
vg = load_grammar("variable_plastic")
print("[0, 1] ->", map_genome(Genome([0, 1]), vg, 50).phenome.text)
print("[1]    ->", map_genome(Genome([1]), vg, 50).failure)

# PIGrow genomes re-map to exactly the tree they were built from.
rng = np.random.default_rng(0)
for _ in range(3):
    genome = pigrow_init(vg, 10, rng)
    ph = map_genome(genome, vg, 10).phenome
    print(f"{len(genome):3d} codons -> {ph.text:<12} depth {ph.depth}")
