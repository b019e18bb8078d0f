"""Dyadic interval combinatorics and the Rademacher-Menshov inequalities.

Sequences are stored with ``2**s + 1`` entries per parameter: the suprema
on the left-hand sides only read indices ``0 .. 2**s - 1`` while the dyadic
block sums on the right-hand sides reach index ``2**s``.

Intervals are half-open on the non-negative integers,
``DyadicInterval(level=i, index=j)`` is ``[(j - 1) * 2**i, j * 2**i)``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ratmax._parallel import parallel_map

SQRT8 = 2.0 * math.sqrt(2.0)
TOL_FACTOR = 1e-12


@dataclass(frozen=True, order=True)
class DyadicInterval:
    level: int
    index: int

    def __post_init__(self):
        if self.level < 0 or self.index < 1:
            raise ValueError(f"invalid dyadic interval (level={self.level}, index={self.index})")

    @property
    def start(self) -> int:
        return (self.index - 1) << self.level

    @property
    def stop(self) -> int:
        return self.index << self.level

    @property
    def length(self) -> int:
        return 1 << self.level

    @classmethod
    def from_bounds(cls, start: int, stop: int) -> "DyadicInterval":
        length = stop - start
        if length <= 0 or length & (length - 1) or start % length:
            raise ValueError(f"[{start}, {stop}) is not a dyadic interval")
        level = length.bit_length() - 1
        return cls(level, start // length + 1)

    def __repr__(self):
        return f"[{self.start},{self.stop})"


@dataclass(frozen=True)
class Decomposition:
    """Pieces of ``[m, n)`` stored as their levels; intervals are built on demand."""

    levels: tuple[int, ...]
    source: tuple[int, int]

    @property
    def parts(self) -> tuple[DyadicInterval, ...]:
        out, pos = [], self.source[0]
        for lv in self.levels:
            out.append(DyadicInterval(lv, (pos >> lv) + 1))
            pos += 1 << lv
        return tuple(out)

    def bounds(self) -> list[tuple[int, int]]:
        out, pos = [], self.source[0]
        for lv in self.levels:
            out.append((pos, pos + (1 << lv)))
            pos += 1 << lv
        return out

    def level_counts(self) -> Counter:
        return Counter(self.levels)

    def is_valid(self) -> bool:
        """Aligned pieces, consecutive, covering ``[m, n)`` and using each length at most twice."""
        m, n = self.source
        pos = m
        for lv in self.levels:
            if pos & ((1 << lv) - 1):
                return False
            pos += 1 << lv
        if pos != n:
            return False
        return max(Counter(self.levels).values(), default=0) <= 2


def decompose(m: int, n: int, s: int) -> Decomposition:
    """Greedy dyadic decomposition of ``[m, n)`` inside ``[0, 2**s)``.

    At each step the longest dyadic interval that starts at the current
    left endpoint and stays inside ``[m, n)`` is taken.
    """
    if not 0 <= m < n <= (1 << s):
        raise ValueError(f"need 0 <= m < n <= 2**s, got m={m}, n={n}, s={s}")
    levels = []
    pos = m
    while pos < n:
        level = min((pos & -pos).bit_length() - 1 if pos else s, (n - pos).bit_length() - 1)
        levels.append(level)
        pos += 1 << level
    return Decomposition(tuple(levels), (m, n))


# -- sequences -----------------------------------------------------------


def _level_of(length: int) -> int:
    s = (length - 1).bit_length() - 1 if length > 1 else -1
    if length < 2 or (1 << s) + 1 != length:
        raise ValueError(f"sequence length {length} is not 2**s + 1")
    return s


@dataclass(frozen=True)
class Seq1:
    """One-parameter sequence ``b_0 .. b_{2**s}``."""

    values: np.ndarray
    s: int = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 1:
            raise ValueError("Seq1 needs a 1-d array")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "s", _level_of(v.shape[0]))


@dataclass(frozen=True)
class Seq2:
    """Two-parameter sequence indexed by ``(0..2**s1) x (0..2**s2)``."""

    values: np.ndarray
    s1: int = field(init=False)
    s2: int = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 2:
            raise ValueError("Seq2 needs a 2-d array")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "s1", _level_of(v.shape[0]))
        object.__setattr__(self, "s2", _level_of(v.shape[1]))


def _seq1(b) -> Seq1:
    return b if isinstance(b, Seq1) else Seq1(b)


def _seq2(a) -> Seq2:
    return a if isinstance(a, Seq2) else Seq2(a)


# -- differences ---------------------------------------------------------


def _check_index(a: np.ndarray, n1: int, n2: int, need1: bool, need2: bool):
    lo1, lo2 = int(need1), int(need2)
    if not (lo1 <= n1 < a.shape[0] and lo2 <= n2 < a.shape[1]):
        raise IndexError(f"difference index ({n1}, {n2}) out of range for shape {a.shape}")


def diff1(a, n1: int, n2: int) -> complex:
    a = np.asarray(getattr(a, "values", a))
    _check_index(a, n1, n2, True, False)
    return a[n1, n2] - a[n1 - 1, n2]


def diff2(a, n1: int, n2: int) -> complex:
    a = np.asarray(getattr(a, "values", a))
    _check_index(a, n1, n2, False, True)
    return a[n1, n2] - a[n1, n2 - 1]


def diff12(a, n1: int, n2: int) -> complex:
    a = np.asarray(getattr(a, "values", a))
    _check_index(a, n1, n2, True, True)
    return a[n1, n2] - a[n1, n2 - 1] - a[n1 - 1, n2] + a[n1 - 1, n2 - 1]


def block_sum(a, i1: int, j1: int, i2: int, j2: int) -> complex:
    """Sum of double differences over a dyadic block, via its four corners."""
    a = np.asarray(getattr(a, "values", a))
    hi1, lo1 = j1 << i1, (j1 - 1) << i1
    hi2, lo2 = j2 << i2, (j2 - 1) << i2
    return a[hi1, hi2] - a[lo1, hi2] - a[hi1, lo2] + a[lo1, lo2]


# -- Rademacher-Menshov --------------------------------------------------


@dataclass(frozen=True)
class RMReport:
    lhs: float
    rhs: float
    holds: bool

    @property
    def ratio(self) -> float:
        if self.rhs == 0.0:
            return 0.0 if self.lhs == 0.0 else math.inf
        return self.lhs / self.rhs


def _level_norms_1d(b: np.ndarray, s: int) -> list[float]:
    # l2 norm of the increments b_{j 2^i} - b_{(j-1) 2^i}, one entry per level i
    out = []
    for i in range(s + 1):
        d = np.diff(b[:: 1 << i])
        out.append(math.sqrt(math.fsum(np.abs(d) ** 2)))
    return out


def rm_rhs_1d(b, n0: int = 0) -> float:
    """Dyadic right-hand side ``2*sqrt(2) * sum_i (sum_j |increment|^2)^(1/2)``.

    The anchor ``n0`` does not enter the bound; it is range checked only.
    """
    b = _seq1(b)
    if not 0 <= n0 < (1 << b.s):
        raise ValueError(f"anchor {n0} outside [0, 2**{b.s})")
    return SQRT8 * math.fsum(_level_norms_1d(b.values, b.s))


def _tolerance(values: np.ndarray) -> float:
    return TOL_FACTOR * float(np.max(np.abs(values), initial=0.0))


def rm_check_1d(b, n0: int = 0) -> RMReport:
    b = _seq1(b)
    rhs = rm_rhs_1d(b, n0)
    v = b.values
    lhs = float(np.max(np.abs(v[: 1 << b.s] - v[n0])))
    return RMReport(lhs, rhs, lhs <= rhs + _tolerance(v))


def rm_rhs_2d(a, n1_0: int = 0, n2_0: int = 0) -> float:
    """Full right-hand side of the two-parameter inequality.

    Double-difference blocks with constant 8, the two one-parameter terms
    anchored at ``n2_0`` and ``n1_0`` with constant ``2*sqrt(2)``, plus
    ``|a[n1_0, n2_0]|``.
    """
    a = _seq2(a)
    s1, s2, v = a.s1, a.s2, a.values
    if not (0 <= n1_0 < (1 << s1) and 0 <= n2_0 < (1 << s2)):
        raise ValueError(f"anchors ({n1_0}, {n2_0}) outside the sup box")
    block_terms = []
    for i1 in range(s1 + 1):
        rows = v[:: 1 << i1]
        for i2 in range(s2 + 1):
            corners = rows[:, :: 1 << i2]
            d = np.diff(np.diff(corners, axis=0), axis=1)
            block_terms.append(math.sqrt(math.fsum(np.abs(d).ravel() ** 2)))
    first = 8.0 * math.fsum(block_terms)
    second = SQRT8 * math.fsum(_level_norms_1d(v[:, n2_0], s1))
    third = SQRT8 * math.fsum(_level_norms_1d(v[n1_0, :], s2))
    return math.fsum([first, second, third, abs(v[n1_0, n2_0])])


def rm_check_2d(a, n1_0: int = 0, n2_0: int = 0) -> RMReport:
    a = _seq2(a)
    rhs = rm_rhs_2d(a, n1_0, n2_0)
    lhs = float(np.max(np.abs(a.values[: 1 << a.s1, : 1 << a.s2])))
    return RMReport(lhs, rhs, lhs <= rhs + _tolerance(a.values))


def rm_ratio(a, n1_0: int = 0, n2_0: int = 0) -> float:
    return rm_check_2d(a, n1_0, n2_0).ratio


def _level_norms_batch(v: np.ndarray, s: int) -> np.ndarray:
    # v has shape (batch, 2**s + 1); returns the sum over levels of the l2 norms
    return sum(np.sqrt(np.sum(np.abs(np.diff(v[:, :: 1 << i], axis=1)) ** 2, axis=1))
               for i in range(s + 1))


def _block_terms_batch(a: np.ndarray, s1: int, s2: int) -> np.ndarray:
    block = np.zeros(a.shape[0])
    for i1 in range(s1 + 1):
        rows = a[:, :: 1 << i1]
        for i2 in range(s2 + 1):
            d = np.diff(np.diff(rows[:, :, :: 1 << i2], axis=1), axis=2)
            block += np.sqrt(np.sum(np.abs(d) ** 2, axis=(1, 2)))
    return block


def rm_check_2d_batch(a, n1_0: int, n2_0: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized :func:`rm_check_2d` over a stack ``a[batch, 2**s1 + 1, 2**s2 + 1]``.

    Returns ``(lhs, rhs, holds)`` arrays. Sums use plain pairwise summation,
    which the per-case tolerance absorbs.
    """
    a = np.asarray(a)
    s1, s2 = _level_of(a.shape[1]), _level_of(a.shape[2])
    if not (0 <= n1_0 < (1 << s1) and 0 <= n2_0 < (1 << s2)):
        raise ValueError(f"anchors ({n1_0}, {n2_0}) outside the sup box")
    rhs = (8.0 * _block_terms_batch(a, s1, s2) + SQRT8 * _level_norms_batch(a[:, :, n2_0], s1)
           + SQRT8 * _level_norms_batch(a[:, n1_0, :], s2) + np.abs(a[:, n1_0, n2_0]))
    lhs = np.max(np.abs(a[:, : 1 << s1, : 1 << s2]), axis=(1, 2))
    tol = TOL_FACTOR * np.max(np.abs(a), axis=(1, 2))
    return lhs, rhs, lhs <= rhs + tol


@dataclass(frozen=True)
class ExhaustiveReport:
    cases: int
    violations: int
    max_ratio: float


def _stencil_matrices(shape: tuple[int, int]):
    """Linear maps from a flattened array to every increment entering the bound.

    Returns ``(Mb, Gb, Mx, Gx, Hx)``. ``A @ Mb`` lists all dyadic double
    differences and ``|.|**2 @ Gb`` sums them per level pair. ``A @ Mx``
    lists the one-parameter increments of every column (anchors ``n2``)
    followed by every row (anchors ``n1``); ``|.|**2 @ Gx`` sums them per
    level and ``sqrt(.) @ Hx`` adds the levels of each column or row.
    """
    r, c = shape
    s1, s2 = _level_of(r), _level_of(c)
    flat = np.arange(r * c).reshape(shape)
    block_cols, block_groups = [], []
    for i1 in range(s1 + 1):
        for i2 in range(s2 + 1):
            g = flat[:: 1 << i1, :: 1 << i2]
            for p, q, u, v in zip(g[1:, 1:].ravel(), g[:-1, 1:].ravel(),
                                  g[1:, :-1].ravel(), g[:-1, :-1].ravel()):
                block_cols.append({p: 1, q: -1, u: -1, v: 1})
                block_groups.append(i1 * (s2 + 1) + i2)
    lines = [(flat[:, n2], s1) for n2 in range(1 << s2)] + [(flat[n1, :], s2) for n1 in range(1 << s1)]
    axis_cols, axis_groups, line_of_group = [], [], []
    for li, (idx, s) in enumerate(lines):
        for i in range(s + 1):
            sub = idx[:: 1 << i]
            for h, lo in zip(sub[1:], sub[:-1]):
                axis_cols.append({h: 1, lo: -1})
                axis_groups.append(len(line_of_group))
            line_of_group.append(li)

    def matrix(cols):
        M = np.zeros((r * c, len(cols)))
        for j, col in enumerate(cols):
            for i, w in col.items():
                M[i, j] += w
        return M

    def grouping(groups, n):
        G = np.zeros((len(groups), n))
        G[np.arange(len(groups)), groups] = 1.0
        return G

    Mb, Gb = matrix(block_cols), grouping(block_groups, (s1 + 1) * (s2 + 1))
    Mx, Gx = matrix(axis_cols), grouping(axis_groups, len(line_of_group))
    Hx = grouping(line_of_group, len(lines))
    return Mb, Gb, Mx, Gx, Hx


def exhaustive_rm_2d(alphabet=(0, 1), s1: int = 2, s2: int = 2,
                     chunk: int = 1 << 12) -> ExhaustiveReport:
    """Check the two-parameter inequality on every array over ``alphabet`` and every anchor.

    Arrays are enumerated as base-``len(alphabet)`` digit strings: the low
    digits run through a fixed table and the high digits are constant inside
    a chunk. All increments are obtained by one matrix product per chunk,
    and the anchor-independent terms are shared across anchors.
    """
    alphabet = np.asarray(alphabet, dtype=float)
    shape = ((1 << s1) + 1, (1 << s2) + 1)
    cells = shape[0] * shape[1]
    k = len(alphabet)
    low = 0
    while low < cells and k ** (low + 1) <= max(chunk, k):
        low += 1
    Mb, Gb, Mx, Gx, Hx = _stencil_matrices(shape)
    n_cols = 1 << s2
    sup_box = np.arange(cells).reshape(shape)[: 1 << s1, : 1 << s2].ravel()
    anchor_cells = [(n1, n2, n1 * shape[1] + n2) for n1 in range(1 << s1) for n2 in range(n_cols)]
    cases = violations = 0
    best = 0.0
    a = np.empty((k**low, cells))
    a[:, :low] = alphabet[(np.arange(k**low)[:, None] // k ** np.arange(low)) % k]
    for hi in range(k ** (cells - low)):
        a[:, low:] = alphabet[(hi // k ** np.arange(cells - low)) % k]
        block = 8.0 * np.sqrt((a @ Mb) ** 2 @ Gb).sum(axis=1)
        lines = SQRT8 * (np.sqrt((a @ Mx) ** 2 @ Gx) @ Hx)
        lhs = np.max(np.abs(a[:, sup_box]), axis=1)
        tol = TOL_FACTOR * np.max(np.abs(a), axis=1)
        rhs_min = np.full(len(a), np.inf)
        rhs_all = []
        for n1, n2, cell in anchor_cells:
            rhs = block + lines[:, n2] + lines[:, n_cols + n1] + np.abs(a[:, cell])
            np.minimum(rhs_min, rhs, out=rhs_min)
            rhs_all.append(rhs)
        cases += len(a) * len(anchor_cells)
        if np.any(lhs > rhs_min + tol):
            violations += sum(int(np.count_nonzero(lhs > rhs + tol)) for rhs in rhs_all)
        if np.any((rhs_min == 0) & (lhs > 0)):
            best = math.inf
        ratio = np.divide(lhs, rhs_min, out=np.zeros_like(lhs), where=rhs_min > 0)
        best = max(best, float(ratio.max()))
    return ExhaustiveReport(cases, violations, best)


# -- extremal search -----------------------------------------------------


@dataclass
class ExtremalReport:
    max_ratio: float
    argmax: np.ndarray
    anchors: tuple[int, int]
    search_ratio: float
    ratios: list[float]

    @property
    def exceeded(self) -> bool:
        return self.max_ratio > 1.0 + 1e-12


def _random_seq2(rng: np.random.Generator, shape: Sequence[int]) -> np.ndarray:
    a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return a / np.linalg.norm(a)


def _climb(args):
    s1, s2, seed, trial, steps = args
    rng = np.random.default_rng([seed, trial])
    shape = ((1 << s1) + 1, (1 << s2) + 1)
    a = _random_seq2(rng, shape)
    n1_0 = int(rng.integers(1 << s1))
    n2_0 = int(rng.integers(1 << s2))
    best = rm_ratio(a, n1_0, n2_0)
    scale = 0.5
    for _ in range(steps):
        cand = a.copy()
        idx = (int(rng.integers(shape[0])), int(rng.integers(shape[1])))
        cand[idx] += scale * (rng.standard_normal() + 1j * rng.standard_normal())
        cand /= np.linalg.norm(cand)
        r = rm_ratio(cand, n1_0, n2_0)
        if r > best:
            a, best = cand, r
        else:
            scale *= 0.9
    return best, a, (n1_0, n2_0)


def extremal_search(s1: int, s2: int, trials: int, seed: int, steps: int = 20,
                    workers: int | None = None) -> ExtremalReport:
    """Hill-climb ``lhs / rhs`` of the two-parameter inequality over unit-norm sequences.

    The constant sequence (ratio exactly 1) is the starting incumbent; each
    trial draws its own generator from ``(seed, trial)`` so the result does
    not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    shape = ((1 << s1) + 1, (1 << s2) + 1)
    const = np.full(shape, 1.0 / math.sqrt(shape[0] * shape[1]), dtype=complex)
    best_ratio, best_a, best_anchor = rm_ratio(const), const, (0, 0)
    results = parallel_map(_climb, [(s1, s2, seed, t, steps) for t in range(trials)], workers)
    ratios = [r for r, _, _ in results]
    search_ratio = max(ratios)
    for r, a, anchor in results:
        if r > best_ratio:
            best_ratio, best_a, best_anchor = r, a, anchor
    return ExtremalReport(best_ratio, best_a, best_anchor, search_ratio, ratios)
