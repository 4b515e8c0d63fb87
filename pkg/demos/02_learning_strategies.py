"""
Lifetime learning on a needle in a haystack
===========================================

The same landscape seen through each learning strategy. Fitness is the
trial count rescaled to [1, 20]; 20 means the target was never expressed.
"""

import numpy as np

from plastigen.landscape import FitnessParams
from plastigen.learning import SocialBoard, evaluate
from plastigen.mapper import Phenome

params = FitnessParams()  # target: twenty 1s, 1000 trials
board = SocialBoard(best_fitness_so_far=20.0, mpl=10, initialized=True)

cases = [
    ("nolearning", "1" * 20),
    ("rollouts", "0" + "1" * 19),          # one flip away
    ("asocial", "1" * 17 + "???"),        # 8 equally likely resolutions
    ("asocial", "0" + "?" * 19),          # a literal 0 can never be resolved away
    ("plastic_expansion", "1" * 18 + "~"),
    ("tabulist", "1" * 18 + "~"),
    ("social", "1" * 9 + "~"),           # PL = MPL = 10: every phenotype has 20 symbols
]

for strategy, text in cases:
    rec = evaluate(strategy, Phenome.from_text(text), params, np.random.default_rng(1), board)
    t = "-" if rec.trials_taken is None else rec.trials_taken
    print(f"{strategy:<18} {text:<22} trials={t:<5} fitness={rec.fitness(params):6.3f}"
          f"  longest={rec.max_expressed_length}")
