"""The five structural features on a modular, scale-free formula versus a
uniform random one.

The constructed instance draws variables from a power law and keeps clauses
inside variable blocks, mimicking what industrial instances look like: a
power-law occurrence exponent between 2 and 3, high modularity, and a small
fractal dimension. The uniform random formula at the same size shows the
opposite profile.

Run:  python demos/demo_structure_features.py
"""

import numpy as np

from cnfscope import CnfFormula, FeatureConfig, extract_features, random_3cnf


def industrial_like(n=3000, m=12000, blocks=10, alpha=2.5, cross=0.08, seed=0):
    """Clauses mostly confined to variable blocks, variables drawn by rank
    weights tuned so occurrence counts follow k**-alpha; a small fraction of
    cross-block clauses keeps the graph connected."""
    rng = np.random.default_rng(seed)
    per = n // blocks
    weights = np.arange(1, per + 1) ** (-1.0 / (alpha - 1.0))
    weights /= weights.sum()
    clauses = []
    for _ in range(m):
        size = int(rng.integers(2, 5))
        if rng.random() < cross:
            vs = rng.choice(n, size=size, replace=False) + 1
        else:
            b = int(rng.integers(blocks))
            vs = b * per + rng.choice(per, size=size, replace=False, p=weights) + 1
        signs = rng.integers(0, 2, size=size) * 2 - 1
        clauses.append(tuple(int(v * s) for v, s in zip(vs, signs)))
    return CnfFormula.from_clauses(n, clauses)


def show(tag, vec):
    print(f"{tag:>12}: alpha={vec.alpha:5.2f}  Q={vec.q:5.2f}  "
          f"d={vec.d:5.2f}  d_b={vec.d_b:5.2f}  m/n={vec.ratio:5.2f}")


cfg = FeatureConfig(seed=1)
show("modular", extract_features(industrial_like(), cfg))
show("random", extract_features(random_3cnf(3000, 12000, seed=0), cfg))

print("\nThe modular instance sits where typical industrial formulas do "
      "(alpha in 2..3, Q near 0.8, small d); the random one has weak "
      "communities and a much larger dimension, and its occurrence counts "
      "are binomial, so its fitted exponent is only a pseudo-exponent.")
