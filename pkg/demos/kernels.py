"""Fejer combinations, parity annuli, maximal averages and decay."""

from fractions import Fraction

import numpy as np

from ratmax.experiments import decay_xi_grid
from ratmax.kernels import (
    DyadicScalePair,
    decay_check,
    dyadic_radii,
    fejer_combination_transform,
    fejer_identity_check,
    fejer_maximal,
    fejer_stable_level,
    hl_maximal,
    osc_fejer_1d,
    parity_masks,
    random_parity_spectrum,
)
from ratmax.oscillation import LacunarySeq
from ratmax.torus import TorusAxis, TorusGrid2

# 2 sigma_2D - sigma_D is flat on |xi| <= D, exactly.
D = Fraction(1, 8)
print("flat part:", [str(fejer_combination_transform(D, x)) for x in (0, D / 2, D, 3 * D / 2, 2 * D)])

# Spectra living on even annuli in one axis and odd in the other see a
# sharp rectangle cutoff as a Fejer combination.
g = TorusGrid2(64, 64, 256, 256)
f = random_parity_spectrum(g, (0, 1), np.random.default_rng(1))
for n1, n2 in [(0, 0), (2, 3), (5, 1)]:
    rep = fejer_identity_check(f, n1, n2, (0, 1))
    print(f"n=({n1},{n2}) cutoffs {rep.D[0]}, {rep.D[1]}: rel err {rep.max_rel_err:.1e}")
print("scale pair n=3:", DyadicScalePair(3).D1, DyadicScalePair(3).D2)

total = sum(m.astype(int) for m in parity_masks(g).values())
print("parity masks cover off-axis bins once:", bool(np.all(total[1:, 1:] == 1)))

# Fejer maximal function against the dyadic box maximal function.
ax = TorusAxis(1024, 1024)
x = np.random.default_rng(2).standard_normal(ax.L)
ns = range(fejer_stable_level(ax) + 1)
ratio = np.max(fejer_maximal(x, ax, ns) / hl_maximal(np.abs(x), dyadic_radii(ax)))
print(f"pointwise Fejer/box maximal ratio on noise: {ratio:.3f}")
N = LacunarySeq.powers_of_two(0, fejer_stable_level(ax))
print(f"Fejer oscillation ratio on noise: {osc_fejer_1d(x, ax, N).ratio:.3f}")

# The gap between Fejer and box transforms decays on both sides of |u| = 1.
rep = decay_check(range(11), 1.0, decay_xi_grid(100_000))
print(f"decay sup ratio {rep.sup_ratio:.6f} at n={rep.argmax[0]}, xi={rep.argmax[1]:.5f}")
