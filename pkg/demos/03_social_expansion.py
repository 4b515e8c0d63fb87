"""
Sizing a phenotype from a shared length
=======================================

Social learners expand each ``~`` so the phenome grows by the gap between
the best individual's longest phenotype (MPL) and their own longest so far
(IPL). Follow the lengths trial by trial.
"""

from collections import Counter

import numpy as np

from plastigen.landscape import FitnessParams
from plastigen.learning import SocialBoard, evaluate_social, social_expand
from plastigen.mapper import Phenome

ph = Phenome.from_text("1~")
board = SocialBoard(best_fitness_so_far=20.0, mpl=20, initialized=True)

ipl = 0
for trial in range(1, 5):
    expanded = social_expand(ph, board, ipl)
    print(f"trial {trial}: IPL={ipl:2d} -> {expanded.text} ({len(expanded)} symbols)")
    ipl = max(ipl, len(expanded))

# the compiled loop produces the same lengths
rec = evaluate_social(ph, FitnessParams(), np.random.default_rng(0), board)
print("expressed lengths over 1000 trials:", dict(Counter(rec.expressed_lengths)))

# with PL = 10 and MPL = 10, every trial after the first has exactly 20 symbols
ph10 = Phenome.from_text("111111111~")
rec = evaluate_social(ph10, FitnessParams(), np.random.default_rng(0),
                      SocialBoard(20.0, 10, True))
print("10-symbol phenome:", dict(rec.expressed_lengths), "found at trial", rec.trials_taken)
