"""
A miniature replicated experiment
=================================

Three variable-length treatments, a handful of seeds and a small
population. Writes the same CSV files as a full sweep and then builds the
plot-ready tables.
"""

import sys
import tempfile
from pathlib import Path

from plastigen.evolution import EvoConfig
from plastigen.experiment import ExperimentSpec, Treatment, report, run_experiment

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="plastigen_"))
spec = ExperimentSpec(
    treatments=[Treatment("asocial", "variable_plastic"),
                Treatment("plastic_expansion", "variable_expansion"),
                Treatment("social", "variable_expansion")],
    replications=4,
    output_dir=str(out),
    evo=EvoConfig(population_size=200, generations=15),
)
result = run_experiment(spec)

print(f"{'treatment':<38}{'succ':>5}{'95% CI':>16}{'len mean':>10}{'len sd':>8}")
for s in result.summaries.values():
    print(f"{s.treatment:<38}{s.successes:>3}/{s.replications}"
          f"  [{s.ci_low:.2f}, {s.ci_high:.2f}]{s.len_mean:>10.2f}{s.len_std:>8.2f}")

report(out)
print("written:", ", ".join(sorted(p.name for p in out.iterdir())))
