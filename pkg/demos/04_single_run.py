"""
One evolutionary run
====================

A reduced population keeps this to a few seconds. Watch the symbol mix
drift as selection rewards phenomes that learn the target quickly.
"""

from plastigen.evolution import EvoConfig, run

cfg = EvoConfig(strategy="asocial", grammar="fixed_plastic", population_size=300,
                generations=30, seed=3, stop_on_success=False)


def show(rec):
    f = rec.symbol_frequencies()
    print(f"gen {rec.generation:2d}  best {rec.best_fitness:6.3f}  "
          f"1={f['1']:.3f} 0={f['0']:.3f} ?={f['?']:.3f}")


result = run(cfg, on_generation=show)
print("success:", result.success, "first at generation", result.success_generation)
