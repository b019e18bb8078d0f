"""Lacunary windows and one- and two-parameter oscillation seminorms.

All seminorms act on finite arrays. A window ``[N_k, N_{k+1}]`` must lie
inside the array; use :meth:`LacunarySeq.truncated` to drop the windows
that run past a given bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

REGIONS = ("00", "01", "10", "11")


@dataclass(frozen=True)
class LacunarySeq:
    """Increasing positive integers with ``tau * N_k <= N_{k+1}``.

    When ``tau`` is omitted the largest admissible value (the smallest
    consecutive ratio) is used.
    """

    terms: tuple[int, ...]
    tau: float | None = None

    def __post_init__(self):
        terms = tuple(int(t) for t in self.terms)
        if not terms or terms[0] < 1:
            raise ValueError("lacunary terms must be positive")
        ratios = [Fraction(b, a) for a, b in zip(terms, terms[1:])]
        # an inferred tau is the smallest ratio, so only a given one is checked
        tau = Fraction(self.tau) if self.tau is not None else min(ratios, default=Fraction(2))
        if tau <= 1:
            raise ValueError(f"lacunarity constant must exceed 1, got {float(tau)}")
        for (a, b), r in zip(zip(terms, terms[1:]), ratios):
            if not a < b or r < tau:
                raise ValueError(f"terms {a}, {b} violate tau={float(tau)} lacunarity")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "tau", float(tau))

    @classmethod
    def geometric(cls, windows: int, tau: float = 2.0, start: int = 1) -> "LacunarySeq":
        """``windows + 1`` terms, each ``ceil(tau * previous)`` and strictly increasing."""
        t = Fraction(tau)
        terms = [start]
        for _ in range(windows):
            terms.append(max(terms[-1] + 1, math.ceil(terms[-1] * t)))
        return cls(tuple(terms), tau)

    @classmethod
    def powers_of_two(cls, k_first: int, k_last: int) -> "LacunarySeq":
        return cls(tuple(1 << k for k in range(k_first, k_last + 1)), 2.0)

    def windows(self) -> list[tuple[int, int]]:
        return list(zip(self.terms, self.terms[1:]))

    def truncated(self, bound: int) -> "LacunarySeq | None":
        kept = tuple(t for t in self.terms if t <= bound)
        return LacunarySeq(kept, self.tau) if kept else None

    def __len__(self):
        return len(self.terms)


def _windows_in(N: LacunarySeq, size: int) -> list[tuple[int, int]]:
    if N.terms[-1] > size - 1:
        raise ValueError(f"window end {N.terms[-1]} outside array of length {size}")
    return N.windows()


def osc_1d(b, N: LacunarySeq) -> float:
    b = np.asarray(b)
    total = math.fsum(
        float(np.max(np.abs(b[lo:hi + 1] - b[lo]))) ** 2 for lo, hi in _windows_in(N, b.shape[0])
    )
    return math.sqrt(total)


def window_sups(a, N: LacunarySeq) -> np.ndarray:
    """``sup_{N_k <= n1, n2 <= N_{k+1}} |a - a[N_k, N_k]|`` for every window."""
    a = np.asarray(a)
    wins = _windows_in(N, min(a.shape[:2]))
    return np.array([np.max(np.abs(a[lo:hi + 1, lo:hi + 1] - a[lo, lo])) for lo, hi in wins])


def osc_2d(a, N: LacunarySeq) -> float:
    return math.sqrt(math.fsum(window_sups(a, N) ** 2))


@dataclass(frozen=True)
class RegionSplit:
    """The four quadrants cut out of the index plane at ``w = (w1, w2)``."""

    w: tuple[int, int]

    def __post_init__(self):
        if min(self.w) < 1:
            raise ValueError("w must be positive")

    def region(self, n1: int, n2: int) -> str:
        return f"{int(n1 >= self.w[0])}{int(n2 >= self.w[1])}"

    def masks(self, shape: tuple[int, int]) -> dict[str, np.ndarray]:
        r1 = np.arange(shape[0])[:, None] >= self.w[0]
        r2 = np.arange(shape[1])[None, :] >= self.w[1]
        return {
            "00": ~r1 & ~r2,
            "01": ~r1 & r2,
            "10": r1 & ~r2,
            "11": r1 & r2,
        }

    def windows_in(self, N: LacunarySeq, mu: str) -> list[int]:
        """Indices ``k`` (0-based) of windows whose diagonal endpoints both lie in region ``mu``."""
        if mu not in REGIONS:
            raise ValueError(f"unknown region tag {mu!r}")
        return [k for k, (lo, hi) in enumerate(N.windows())
                if self.region(lo, lo) == mu and self.region(hi, hi) == mu]


def osc_mu(a, N: LacunarySeq, w: tuple[int, int], mu: str) -> float:
    split = RegionSplit(tuple(w))
    ks = split.windows_in(N, mu)
    sups = window_sups(a, N)
    return math.sqrt(math.fsum(sups[ks] ** 2))


@dataclass(frozen=True)
class RegionSplitReport:
    lhs: float
    rhs: float
    holds: bool
    parts: dict


def lemma3_check(a, N: LacunarySeq, w: tuple[int, int]) -> RegionSplitReport:
    """Compare ``osc_2d`` with ``4 sup|a| + sum_mu osc_mu``."""
    a = np.asarray(a)
    lhs = osc_2d(a, N)
    sup = float(np.max(np.abs(a)))
    parts = {mu: osc_mu(a, N, w, mu) for mu in REGIONS}
    rhs = 4.0 * sup + math.fsum(parts.values())
    return RegionSplitReport(lhs, rhs, lhs <= rhs + 1e-12 * max(sup, 1.0), parts)


def witness_windows(a, eps: float) -> LacunarySeq | None:
    """Greedy lacunary sequence whose every window oscillates by at least ``eps``.

    Starting from ``N_1 = 1``, the first index pair ``(u1, u2) >= N_k`` in
    lexicographic order with ``|a[u1, u2] - a[N_k, N_k]| >= eps`` and whose
    window ``N_{k+1} = 2 * max(u1, u2)`` still fits in the array is used.
    Construction stops at the first step without such a pair; ``None`` means
    not even one window could be built.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    a = np.asarray(a)
    bound = min(a.shape) - 1
    terms = [1]
    while True:
        nk = terms[-1]
        top = bound // 2
        if nk > top:
            break
        block = np.abs(a[nk:top + 1, nk:top + 1] - a[nk, nk]) >= eps
        hits = np.argwhere(block)
        if hits.size == 0:
            break
        u1, u2 = hits[0] + nk
        terms.append(2 * int(max(u1, u2)))
    if len(terms) < 2:
        return None
    return LacunarySeq(tuple(terms), 2.0)


def _diameter(values: np.ndarray) -> float:
    pts = np.unique(np.asarray(values, dtype=complex).ravel())
    if pts.size < 2:
        return 0.0
    if np.all(pts.imag == 0):
        return float(pts.real.max() - pts.real.min())
    if pts.size > 2000:
        from scipy.spatial import ConvexHull, QhullError

        xy = np.column_stack([pts.real, pts.imag])
        try:
            pts = pts[ConvexHull(xy).vertices]
        except QhullError:
            pass  # collinear points; fall through to the direct scan
    best = 0.0
    for chunk in np.array_split(pts, max(1, pts.size // 512)):
        best = max(best, float(np.max(np.abs(chunk[:, None] - pts[None, :]))))
    return best


def converges_diag(a, eps: float) -> bool:
    """Finite Cauchy test: all entries with ``n_r >= shape_r // 2`` lie pairwise within ``eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    a = np.asarray(a)
    tail = a[a.shape[0] // 2:, a.shape[1] // 2:]
    return _diameter(tail) < eps


def counterexample(bound: int) -> np.ndarray:
    """``a[n1, n2] = n2`` on the row ``n1 = 0`` and zero elsewhere, for ``0 <= n1, n2 <= bound``."""
    a = np.zeros((bound + 1, bound + 1))
    a[0, :] = np.arange(bound + 1)
    return a


def all_lacunary(bound: int, min_first: int = 1, tau: float = 2.0) -> Iterable[LacunarySeq]:
    """Every lacunary sequence with at least two terms inside ``[min_first, bound]``.

    Exponential in ``log(bound)``; meant for exhaustive checks on small bounds.
    """
    def extend(seq):
        yield seq
        nxt = max(seq[-1] + 1, math.ceil(tau * seq[-1]))
        for t in range(nxt, bound + 1):
            yield from extend(seq + (t,))

    for first in range(min_first, bound + 1):
        for seq in itertools.islice(extend((first,)), 1, None):
            yield LacunarySeq(seq, tau)
