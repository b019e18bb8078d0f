"""Lacunary oscillation of two-index arrays, the region split and witnesses."""

import numpy as np

from ratmax.oscillation import (
    LacunarySeq,
    converges_diag,
    counterexample,
    lemma3_check,
    osc_2d,
    witness_windows,
)

N = LacunarySeq.powers_of_two(0, 6)
print("windows:", N.windows())

# The row counterexample: unbounded on the first row, zero elsewhere.
# Oscillation only reads indices >= 1, so it sees nothing.
a = counterexample(64)
print(f"counterexample: sup={a.max():.0f} osc={osc_2d(a, N):.1f} diag converges={converges_diag(a, 1e-9)}")

# Alternating signs jump by 2 on every window of the diagonal square.
n1, n2 = np.meshgrid(np.arange(65), np.arange(65), indexing="ij")
alt = (-1.0) ** (n1 + n2)
print(f"alternating: osc={osc_2d(alt, N):.3f} = 2 sqrt({len(N) - 1})")

# Splitting the windows at w bounds the full oscillation by four sups
# plus the oscillation restricted to each of the four regions.
rep = lemma3_check(alt, N, (8, 16))
print(f"region split: lhs={rep.lhs:.3f} rhs={rep.rhs:.3f}")
for mu, v in rep.parts.items():
    print(f"  region {mu}: {v:.3f}")

# Greedy witness: each new window holds a jump of size eps.
W = witness_windows(alt, 1.0)
print("witness windows for eps=1:", W.terms)
