"""Dyadic decompositions and the dyadic sup inequalities."""

import numpy as np

from ratmax.dyadic import decompose, exhaustive_rm_2d, extremal_search, rm_check_1d, rm_check_2d

# Greedy decomposition: take the longest aligned dyadic block at each step.
d = decompose(1, 7, 3)
print("[1, 7) ->", d.bounds(), "levels", dict(d.level_counts()))

# Every length shows up at most twice, for every pair in [0, 2**6].
ok = all(decompose(m, n, 6).is_valid() for n in range(1, 65) for m in range(n))
print("all decompositions in [0, 64] valid:", ok)

# One-parameter bound: the sup of partial differences against the level norms.
b = np.array([0.0, 1.0, 0.0])
rep = rm_check_1d(b, 0)
print(f"1D spike: lhs={rep.lhs:.3f} rhs={rep.rhs:.3f}")

rng = np.random.default_rng(0)
a = rng.standard_normal((17, 9)) + 1j * rng.standard_normal((17, 9))
rep = rm_check_2d(a, 5, 2)
print(f"2D random 17x9: lhs={rep.lhs:.3f} rhs={rep.rhs:.3f} ratio={rep.ratio:.3f}")

# A constant sequence is tight: only the anchor term survives.
print("constant ratio:", rm_check_2d(np.full((5, 5), 2.0), 1, 3).ratio)

# Exhaustive over the ternary alphabet on 3x3 arrays, every anchor.
ex = exhaustive_rm_2d((-1, 0, 1), 1, 1)
print(f"ternary 3x3: {ex.cases} cases, {ex.violations} violations, max ratio {ex.max_ratio:.3f}")

# Local search for bad sequences stays at or below ratio 1.
ext = extremal_search(2, 2, trials=6, seed=1, steps=6)
print(f"extremal search 5x5: best ratio {ext.max_ratio:.3f}")
