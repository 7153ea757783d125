"""Feature-based solver selection on a synthetic three-family corpus.

Each family gets a feature signature and a solver that is fast only on it.
Leave-one-out classification recovers the families from the five features,
and the inverse-distance-squared runtime predictor picks the right solver
nearly everywhere, approaching the virtual best solver.

Run:  python demos/demo_portfolio.py
"""

import numpy as np

from cnfscope import (
    FeatureMatrix,
    FeatureRow,
    FeatureVector,
    RuntimeMatrix,
    loo_classify,
    loo_portfolio_sim,
)

rng = np.random.default_rng(12)
families = {
    "crypto": dict(alpha=2.2, q=0.82, d=2.3, d_b=2.1, ratio=4.1),
    "planning": dict(alpha=2.9, q=0.64, d=3.1, d_b=2.6, ratio=6.5),
    "random": dict(alpha=8.0, q=0.21, d=5.8, d_b=3.0, ratio=4.25),
}
specialist = {"crypto": "sA", "planning": "sB", "random": "sC"}
solvers = sorted(set(specialist.values()))

rows, times = [], []
for fam, center in families.items():
    for k in range(12):
        jitter = {key: val * float(1 + 0.05 * rng.normal())
                  for key, val in center.items()}
        rows.append(FeatureRow(f"{fam}-{k:02d}", fam, FeatureVector(**jitter)))
        row = []
        for s in solvers:
            if s == specialist[fam]:
                row.append(float(rng.uniform(5, 60)))
            else:
                row.append(np.inf if rng.random() < 0.7
                           else float(rng.uniform(300, 900)))
        times.append(row)

matrix = FeatureMatrix(rows)
runtime = RuntimeMatrix(matrix.instance_ids, solvers, times, 900.0)

rep = loo_classify(matrix)
print(f"family classification (LOO decision tree): "
      f"{rep.successes}/{rep.total} = {rep.accuracy:.0%}")

sim = loo_portfolio_sim(matrix, runtime)
print(f"portfolio: solved {sim.solved_count}/{len(rows)} "
      f"(virtual best solver {sim.vbs_count}), "
      f"avg time over solved {sim.avg_time:.1f}s")

picked = {}
for r in sim.per_instance:
    fam = r["instance"].split("-")[0]
    picked.setdefault(fam, []).append(r["solver"])
for fam, chosen in picked.items():
    hits = sum(1 for s in chosen if s == specialist[fam])
    print(f"  {fam:>9}: picked its specialist {hits}/{len(chosen)} times")
