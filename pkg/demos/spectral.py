"""Rational frequency sets, rectangle masks and the operators built from them."""

import numpy as np

from ratmax.oscillation import LacunarySeq
from ratmax.spectral import (
    FrequencySet,
    build_masks,
    gen_rationals,
    grid_for,
    maximal_op,
    norm_estimate,
    osc_op,
    periodized_bound_test,
    variation_sums,
)
from ratmax.torus import Spectrum2

for s in range(4):
    print(f"s={s}: {len(gen_rationals(s))} reduced fractions with denominator in [{2**s}, {2**(s+1)})")
print("s=1:", [str(f) for f in gen_rationals(1)])

# Scaling by 4**(s+1) separates the points by more than 1.
fs = FrequencySet.scaled_rationals(1).centered()
print("scaled, centered:", [str(x) for x, _ in fs.fractions()], "separated:", fs.is_separated())

g = grid_for(fs)
masks = build_masks(g, fs)
print("grid:", g, "stable from", masks.stable_from(0), masks.stable_from(1))

# Separation keeps every mask difference a union of disjoint boxes, so each sum is 1.
print("variation sums:", variation_sums(masks).as_dict())

rng = np.random.default_rng(0)
f = Spectrum2(g, rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape))
M = maximal_op(f, masks)
O = osc_op(f, masks, LacunarySeq.powers_of_two(0, 4))
print(f"||Mf||/||f|| = {g.sample_norm(M) / f.norm():.3f}   ||Of||/||f|| = {g.sample_norm(O) / f.norm():.3f}")

est = norm_estimate(masks, "max", trials=4, seed=0, ascent_steps=4)
print(f"norm search, best ratio {est.best_ratio:.3f} after {est.evaluations} evaluations")

# Periodized pieces: one box spectrum per frequency.
rep = periodized_bound_test(masks, trials=10, seed=0)
print(f"periodized ratio {rep.ratio:.3f} from scale ({rep.S1}, {rep.S2})")
