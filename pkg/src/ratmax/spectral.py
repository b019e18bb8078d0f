"""Rectangle multipliers over separated rational frequency sets on a discrete torus.

A frequency ``lambda`` in ``Q^-1 Z`` sits exactly on bin ``p * (Q_grid / Q)``
of a grid whose circumference ``Q_grid`` is a multiple of ``Q``. Membership
in ``lambda + A_n`` with ``A_n = (-2**(-n-1), 2**(-n-1))`` is decided in
integers: bin ``k`` is inside iff ``|k - p| * 2**(n+1) < Q_grid``.

Past ``n = ceil(log2 Q_grid)`` every rectangle has shrunk to the single bin
at ``lambda``; the families below are therefore stored for
``0 <= n_r <= n_max_r = ceil(log2 Q_grid_r) + 1`` and any larger index is
read as ``n_max_r``. Suprema and oscillations over all of ``N_0`` are exact
under this clamping.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from ratmax.oscillation import LacunarySeq
from ratmax.torus import Spectrum2, TorusGrid2

MAX_RATIONAL_LEVEL = 12


def ceil_log2(q: int) -> int:
    return (q - 1).bit_length()


def gen_rationals(s: int) -> list[Fraction]:
    """Reduced fractions ``a/q`` in ``[0, 1]`` with ``2**s <= q < 2**(s+1)``, sorted."""
    if s < 0:
        raise ValueError("s must be non-negative")
    if s > MAX_RATIONAL_LEVEL:
        raise OverflowError(f"s={s} would enumerate ~4**{s} fractions")
    out = [Fraction(a, q) for q in range(1 << s, 1 << (s + 1))
           for a in range(q + 1) if math.gcd(a, q) == 1]
    return sorted(out)


def rational_lcm(s: int) -> int:
    """Least common multiple of the denominators ``2**s <= q < 2**(s+1)``."""
    return reduce(math.lcm, range(1 << s, 1 << (s + 1)), 1)


def _as_pair(p):
    return (Fraction(p[0]), Fraction(p[1])) if isinstance(p, (tuple, list)) else (Fraction(p),)


def check_separation(points: Sequence, scale=1) -> bool:
    """Whether all distinct scaled points are at max-metric distance >= 1.

    ``points`` holds scalars (one-parameter) or pairs; arithmetic is exact
    when the entries are ints or ``Fraction``.
    """
    scale = Fraction(scale)
    pts = sorted({tuple(scale * c for c in _as_pair(p)) for p in points})
    if not pts:
        return True
    if len(pts[0]) == 1:
        return all(b[0] - a[0] >= 1 for a, b in zip(pts, pts[1:]))
    for a, b in itertools.combinations(pts, 2):
        if max(abs(a[0] - b[0]), abs(a[1] - b[1])) < 1:
            return False
    return True


def loglog(Q: int, count: int) -> float:
    """``log2 log2 (Q * sqrt(count))``; ``-inf`` once the inner logarithm is <= 0."""
    inner = math.log2(Q) + 0.5 * math.log2(count) if count else -math.inf
    return math.log2(inner) if inner > 0 else -math.inf


def u11_level(Q: int, count: int) -> int:
    """``s = ceil(log2 log2 (Q sqrt|Lambda|))`` clamped at 0; the large-parameter region starts at ``2**s``."""
    v = loglog(Q, count)
    return max(0, math.ceil(v)) if math.isfinite(v) else 0


@dataclass(frozen=True)
class FrequencySet:
    """Finite ``Lambda`` in ``Q1^-1 Z x Q2^-1 Z`` stored as integer numerators."""

    Q1: int
    Q2: int
    points: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pts = tuple(sorted({(int(a), int(b)) for a, b in self.points}))
        object.__setattr__(self, "points", pts)
        if self.Q1 < 1 or self.Q2 < 1:
            raise ValueError("denominators must be positive")

    @classmethod
    def from_fractions(cls, points, Q1: int | None = None, Q2: int | None = None) -> "FrequencySet":
        pts = [(Fraction(a), Fraction(b)) for a, b in points]
        Q1 = Q1 or reduce(math.lcm, (p[0].denominator for p in pts), 1)
        Q2 = Q2 or reduce(math.lcm, (p[1].denominator for p in pts), 1)
        out = []
        for a, b in pts:
            na, nb = a * Q1, b * Q2
            if na.denominator != 1 or nb.denominator != 1:
                raise ValueError(f"point ({a}, {b}) not in ({Q1}^-1 Z) x ({Q2}^-1 Z)")
            out.append((int(na), int(nb)))
        return cls(Q1, Q2, tuple(out))

    @classmethod
    def from_1d(cls, fracs, Q: int | None = None) -> "FrequencySet":
        """One-parameter set embedded as ``Lambda x {0}`` with trivial second axis."""
        return cls.from_fractions([(f, 0) for f in fracs], Q, 1)

    @classmethod
    def scaled_rationals(cls, s: int, dim: int = 1) -> "FrequencySet":
        """``4**(s+1) * R_s`` with ``Q = lcm(2**s .. 2**(s+1) - 1)``; ``dim=2`` takes the product set."""
        fr = [4 ** (s + 1) * f for f in gen_rationals(s)]
        Q = rational_lcm(s)
        if dim == 1:
            return cls.from_1d(fr, Q)
        if dim == 2:
            return cls.from_fractions([(a, b) for a in fr for b in fr], Q, Q)
        raise ValueError("dim must be 1 or 2")

    def __len__(self):
        return len(self.points)

    def fractions(self) -> list[tuple[Fraction, Fraction]]:
        return [(Fraction(a, self.Q1), Fraction(b, self.Q2)) for a, b in self.points]

    def is_separated(self) -> bool:
        return check_separation(self.fractions())

    def translated(self, c1: int, c2: int) -> "FrequencySet":
        """Shift by the integer vector ``(c1, c2)``; denominators are unchanged."""
        return FrequencySet(self.Q1, self.Q2,
                            tuple((a + c1 * self.Q1, b + c2 * self.Q2) for a, b in self.points))

    def centered(self) -> "FrequencySet":
        if not self.points:
            return self
        p = np.array(self.points)
        mid = (p.min(axis=0) + p.max(axis=0)) / 2
        return self.translated(-round(mid[0] / self.Q1), -round(mid[1] / self.Q2))

    def loglogs(self) -> tuple[float, float]:
        return loglog(self.Q1, len(self)), loglog(self.Q2, len(self))


def grid_for(freqs: FrequencySet, refine: int = 1, min_L: int = 8) -> TorusGrid2:
    """Smallest power-of-two grid holding every unit box around ``Lambda``.

    The grid circumference is ``refine`` times the set's denominators. The
    set should be centered first for a compact grid.
    """
    sizes = []
    for r, Q in enumerate((freqs.Q1, freqs.Q2)):
        Qg = Q * refine
        d0 = (Qg - 1) // 2
        ps = [pt[r] * refine for pt in freqs.points] or [0]
        need = max(max(ps) + d0 + 1, -(min(ps) - d0))
        L = max(min_L, 2)
        while L // 2 < need:
            L *= 2
        sizes.append(L)
    return TorusGrid2(freqs.Q1 * refine, freqs.Q2 * refine, sizes[0], sizes[1])


@dataclass(eq=False)
class MaskFamily:
    """Indicators of ``union_lambda (lambda + A_n1 x A_n2)`` on the bins of ``grid``."""

    grid: TorusGrid2
    freqs: FrequencySet
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        g, f = self.grid, self.freqs
        if g.Q1 % f.Q1 or g.Q2 % f.Q2:
            raise ValueError(f"frequencies over ({f.Q1}, {f.Q2}) are off the grid bins of "
                             f"({g.Q1}, {g.Q2})")
        m1, m2 = g.Q1 // f.Q1, g.Q2 // f.Q2
        self.bins = tuple((a * m1, b * m2) for a, b in f.points)
        for r, (L, Q) in enumerate(((g.L1, g.Q1), (g.L2, g.Q2))):
            d0 = self.radius(r, 0)
            for pt in self.bins:
                if pt[r] - d0 < -L // 2 or pt[r] + d0 >= L // 2:
                    raise ValueError(f"frequency box around bin {pt} leaves the grid")
        self.n1_max = ceil_log2(g.Q1) + 1
        self.n2_max = ceil_log2(g.Q2) + 1

    def radius(self, axis: int, n: int) -> int:
        """Largest bin offset ``d`` with ``d / Q_grid < 2**(-n-1)``."""
        Q = self.grid.Q1 if axis == 0 else self.grid.Q2
        return (Q - 1) >> (n + 1)

    def stable_from(self, axis: int) -> int:
        """First ``n`` at which the rectangles on ``axis`` are single bins."""
        Q = self.grid.Q1 if axis == 0 else self.grid.Q2
        return max(0, ceil_log2(Q) - 1)

    def clamp(self, n1: int, n2: int) -> tuple[int, int]:
        if n1 < 0 or n2 < 0:
            raise ValueError("mask indices are non-negative")
        return min(n1, self.n1_max), min(n2, self.n2_max)

    def mask(self, n1: int, n2: int) -> np.ndarray:
        key = self.clamp(n1, n2)
        if key not in self._cache:
            L1, L2 = self.grid.shape
            d1, d2 = self.radius(0, key[0]), self.radius(1, key[1])
            m = np.zeros((L1, L2), dtype=bool)
            for p1, p2 in self.bins:
                m[p1 - d1 + L1 // 2:p1 + d1 + 1 + L1 // 2, p2 - d2 + L2 // 2:p2 + d2 + 1 + L2 // 2] = True
            m = np.fft.ifftshift(m)
            m.setflags(write=False)
            self._cache[key] = m
        return self._cache[key]

    def member(self, n1: int, n2: int, k1, k2) -> np.ndarray:
        """Mask values at arbitrary bin labels, without building the full array."""
        return self.member_fn(k1, k2)(n1, n2)

    def member_fn(self, k1, k2):
        """``(n1, n2) -> mask values at the bins (k1, k2)``, sharing the distance computation."""
        k1, k2 = np.asarray(k1), np.asarray(k2)
        dist = [(np.abs(k1 - p1), np.abs(k2 - p2)) for p1, p2 in self._near(k1, k2)]
        shape = np.broadcast(k1, k2).shape

        def m(n1, n2):
            n1, n2 = self.clamp(n1, n2)
            d1, d2 = self.radius(0, n1), self.radius(1, n2)
            out = np.zeros(shape, dtype=bool)
            for e1, e2 in dist:
                out |= (e1 <= d1) & (e2 <= d2)
            return out

        return m

    def _near(self, k1, k2):
        # frequencies whose widest box can reach the given bins
        d1, d2 = self.radius(0, 0), self.radius(1, 0)
        lo1, hi1, lo2, hi2 = k1.min(), k1.max(), k2.min(), k2.max()
        return [(p1, p2) for p1, p2 in self.bins
                if p1 + d1 >= lo1 and p1 - d1 <= hi1 and p2 + d2 >= lo2 and p2 - d2 <= hi2]

    def box_bins(self):
        """Per frequency, the bin labels of its widest rectangle (the support of ``mask(0, 0)``)."""
        d1, d2 = self.radius(0, 0), self.radius(1, 0)
        for p1, p2 in self.bins:
            k1, k2 = np.meshgrid(np.arange(p1 - d1, p1 + d1 + 1), np.arange(p2 - d2, p2 + d2 + 1),
                                 indexing="ij")
            yield k1.ravel(), k2.ravel()

    def indices(self):
        return itertools.product(range(self.n1_max + 1), range(self.n2_max + 1))

    def export_bitsets(self, path) -> None:
        """Write every mask, centered and bit-packed, to an ``.npz`` archive."""
        arrays = {f"n{a}_{b}": np.packbits(np.fft.fftshift(self.mask(a, b)), axis=None)
                  for a, b in self.indices()}
        g = self.grid
        np.savez_compressed(path, grid=np.array([g.Q1, g.Q2, g.L1, g.L2]),
                            points=np.array(self.bins).reshape(-1, 2), **arrays)


def build_masks(grid: TorusGrid2, freqs: FrequencySet) -> MaskFamily:
    return MaskFamily(grid, freqs)


def load_bitset(path, n1: int, n2: int) -> np.ndarray:
    """Read one centered mask back from :meth:`MaskFamily.export_bitsets` output."""
    with np.load(path) as z:
        _, _, L1, L2 = z["grid"]
        bits = np.unpackbits(z[f"n{n1}_{n2}"], count=int(L1 * L2))
    return bits.reshape(int(L1), int(L2)).astype(bool)


# -- operators -----------------------------------------------------------


def apply_multiplier(f: Spectrum2, mask) -> np.ndarray:
    m = np.asarray(mask)
    if m.shape != f.coeffs.shape:
        raise ValueError(f"mask shape {m.shape} does not match spectrum {f.coeffs.shape}")
    return np.fft.ifft2(f.coeffs * m)


class _Family:
    """Lazily evaluated ``T_{n1,n2} f`` keyed by clamped index."""

    def __init__(self, f: Spectrum2, masks: MaskFamily):
        if f.grid != masks.grid:
            raise ValueError("spectrum and masks live on different grids")
        self.f, self.masks, self.cache = f, masks, {}

    def __call__(self, n1, n2):
        key = self.masks.clamp(n1, n2)
        if key not in self.cache:
            self.cache[key] = apply_multiplier(self.f, self.masks.mask(*key))
        return self.cache[key]


def maximal_op(f: Spectrum2, masks: MaskFamily, n1_min: int = 0, n2_min: int = 0) -> np.ndarray:
    """Pointwise ``sup_{n1 >= n1_min, n2 >= n2_min} |T_{n1,n2} f|``."""
    fam = _Family(f, masks)
    lo1, lo2 = masks.clamp(n1_min, n2_min)
    out = np.zeros(f.grid.shape)
    for n1 in range(lo1, masks.n1_max + 1):
        for n2 in range(lo2, masks.n2_max + 1):
            np.maximum(out, np.abs(fam(n1, n2)), out=out)
            fam.cache.clear()
    return out


def osc_op(f: Spectrum2, masks: MaskFamily, N: LacunarySeq) -> np.ndarray:
    """Pointwise two-parameter oscillation of ``(T_{n1,n2} f)`` along the windows of ``N``."""
    fam = _Family(f, masks)
    total = np.zeros(f.grid.shape)
    for lo, hi in N.windows():
        anchor = fam(lo, lo)
        a1, a2 = masks.clamp(lo, lo)
        b1, b2 = masks.clamp(hi, hi)
        sup = np.zeros(f.grid.shape)
        for n1 in range(a1, b1 + 1):
            for n2 in range(a2, b2 + 1):
                np.maximum(sup, np.abs(fam(n1, n2) - anchor), out=sup)
        total += sup**2
    return np.sqrt(total)


@dataclass(frozen=True)
class VariationReport:
    B_11: int
    B_1: int
    B_2: int
    B_0: int

    def as_dict(self):
        return {"B_11": self.B_11, "B_1": self.B_1, "B_2": self.B_2, "B_0": self.B_0}


SPARSE_BINS = 1 << 22


def _variation_arrays(m, n1_max: int, n2_max: int):
    # m(a, b) returns the family at index (a, b) as small integers on some set of bins
    prev = [m(0, b) for b in range(n2_max + 1)]
    s11 = np.zeros(prev[0].shape, dtype=np.int32)
    s1 = np.zeros_like(s11)
    for a in range(1, n1_max + 1):
        row = [m(a, b) for b in range(n2_max + 1)]
        s1 += np.abs(row[0] - prev[0])
        for b in range(1, n2_max + 1):
            s11 += np.abs(row[b] - row[b - 1] - prev[b] + prev[b - 1])
        prev = row
    s2 = np.zeros_like(s11)
    col = [m(0, b) for b in range(n2_max + 1)]
    for b in range(1, n2_max + 1):
        s2 += np.abs(col[b] - col[b - 1])
    return s11, s1, s2, col[0]


def variation_sums(masks: MaskFamily, sparse: bool | None = None) -> VariationReport:
    """Sup over bins of the mixed, single and zeroth variation sums of the family.

    With ``sparse`` the sums are evaluated only on the bins of the widest
    rectangles, one frequency at a time. Every other bin lies outside all
    masks, so the suprema are the same. By default the sparse path is taken
    on grids with more than ``SPARSE_BINS`` bins.
    """
    if sparse is None:
        sparse = masks.grid.L1 * masks.grid.L2 > SPARSE_BINS
    if not sparse:
        arrays = _variation_arrays(lambda a, b: masks.mask(a, b).astype(np.int8),
                                   masks.n1_max, masks.n2_max)
        return VariationReport(*(int(x.max()) for x in arrays))
    best = [0, 0, 0, 0]
    for k1, k2 in masks.box_bins():
        m = masks.member_fn(k1, k2)
        arrays = _variation_arrays(lambda a, b: m(a, b).astype(np.int8), masks.n1_max, masks.n2_max)
        best = [max(x, int(y.max(initial=0))) for x, y in zip(best, arrays)]
    return VariationReport(*best)


def block_multiplier(masks: MaskFamily, i1: int, j1: int, i2: int, j2: int) -> np.ndarray:
    """Sum of the mixed differences over the dyadic block, as its four-corner combination."""
    hi1, lo1, hi2, lo2 = j1 << i1, (j1 - 1) << i1, j2 << i2, (j2 - 1) << i2
    m = lambda a, b: masks.mask(a, b).astype(np.int8)  # noqa: E731
    return m(hi1, hi2) - m(lo1, hi2) - m(hi1, lo2) + m(lo1, lo2)


@dataclass
class SquareFunctions:
    S: np.ndarray
    S1: np.ndarray
    S2: np.ndarray
    ratios: dict


def square_functions(f: Spectrum2, masks: MaskFamily) -> SquareFunctions:
    m = lambda a, b: masks.mask(a, b).astype(np.int8)  # noqa: E731
    c = f.coeffs
    S = np.zeros(f.grid.shape)
    for a in range(1, masks.n1_max + 1):
        for b in range(1, masks.n2_max + 1):
            d = m(a, b) - m(a, b - 1) - m(a - 1, b) + m(a - 1, b - 1)
            if d.any():
                S += np.abs(np.fft.ifft2(d * c)) ** 2
    S1 = np.zeros(f.grid.shape)
    for a in range(1, masks.n1_max + 1):
        d = m(a, 0) - m(a - 1, 0)
        if d.any():
            S1 += np.abs(np.fft.ifft2(d * c)) ** 2
    S2 = np.zeros(f.grid.shape)
    for b in range(1, masks.n2_max + 1):
        d = m(0, b) - m(0, b - 1)
        if d.any():
            S2 += np.abs(np.fft.ifft2(d * c)) ** 2
    S, S1, S2 = np.sqrt(S), np.sqrt(S1), np.sqrt(S2)
    fn = f.norm()
    g = f.grid
    ratios = {k: (g.sample_norm(v) / fn if fn else 0.0) for k, v in (("S", S), ("S1", S1), ("S2", S2))}
    return SquareFunctions(S, S1, S2, ratios)


# -- periodization -------------------------------------------------------


@dataclass
class PeriodizedReport:
    lhs_sq: float
    rhs: float
    ratio: float
    trial_ratios: list[float]
    S1: int
    S2: int
    degenerate: bool


def u11_start(masks: MaskFamily) -> tuple[int, int]:
    f = masks.freqs
    return 1 << u11_level(f.Q1, len(f)), 1 << u11_level(f.Q2, len(f))


def assemble_spectrum(masks: MaskFamily, boxes: Sequence[np.ndarray]) -> Spectrum2:
    """Place per-frequency box spectra (offsets within the unit box at the origin) at each ``lambda``."""
    g = masks.grid
    d1, d2 = masks.radius(0, 0), masks.radius(1, 0)
    if len(boxes) != len(masks.bins):
        raise ValueError(f"expected {len(masks.bins)} box spectra, got {len(boxes)}")
    c = np.zeros(g.shape, dtype=complex)
    o1 = np.arange(-d1, d1 + 1)
    o2 = np.arange(-d2, d2 + 1)
    for (p1, p2), box in zip(masks.bins, boxes):
        box = np.asarray(box, dtype=complex)
        if box.shape != (2 * d1 + 1, 2 * d2 + 1):
            raise ValueError(f"box spectrum of shape {box.shape} is not supported in the unit box "
                             f"({2 * d1 + 1}, {2 * d2 + 1})")
        c[np.ix_((p1 + o1) % g.L1, (p2 + o2) % g.L2)] = box
    return Spectrum2(g, c)


def box_norm2(masks: MaskFamily, box: np.ndarray) -> float:
    return masks.grid.cell_area / (masks.grid.L1 * masks.grid.L2) * float(np.sum(np.abs(box) ** 2))


def periodized_bound_test(masks: MaskFamily, spectra: Sequence[np.ndarray] | None = None, *,
                          trials: int = 1, seed: int = 0) -> PeriodizedReport:
    """Evaluate ``||sup_{U11} |sum_lambda e(lambda x) T_n f_lambda| ||^2`` against ``sum ||f_lambda||^2``.

    ``spectra`` gives one box spectrum per frequency; when omitted, ``trials``
    complex Gaussian draws are evaluated and the largest ratio is reported.
    The large-parameter region starts at ``S_r = 2**s_r`` computed from the
    set's own denominators; ``degenerate`` flags that the family is already
    constant there.
    """
    S1, S2 = u11_start(masks)
    degenerate = S1 >= masks.stable_from(0) and S2 >= masks.stable_from(1)
    d1, d2 = masks.radius(0, 0), masks.radius(1, 0)
    if spectra is not None:
        draws = [list(spectra)]
    else:
        draws = []
        for t in range(trials):
            rng = np.random.default_rng([seed, t])
            shape = (len(masks.bins), 2 * d1 + 1, 2 * d2 + 1)
            draws.append(list(rng.standard_normal(shape) + 1j * rng.standard_normal(shape)))
    best = None
    ratios = []
    for boxes in draws:
        rhs = math.fsum(box_norm2(masks, b) for b in boxes)
        if not boxes:
            lhs_sq = 0.0
        else:
            F = assemble_spectrum(masks, boxes)
            lhs_sq = masks.grid.sample_norm(maximal_op(F, masks, S1, S2)) ** 2
        ratio = lhs_sq / rhs if rhs > 0 else 0.0
        ratios.append(ratio)
        if best is None or ratio > best[2]:
            best = (lhs_sq, rhs, ratio)
    return PeriodizedReport(best[0], best[1], best[2], ratios, S1, S2, degenerate)


# -- operator norm search ------------------------------------------------


@dataclass
class NormEstimate:
    best_ratio: float
    witness: Spectrum2 | None
    evaluations: int
    history: list[float]


def operator_ratio(f: Spectrum2, masks: MaskFamily, mode: str = "max",
                   N: LacunarySeq | None = None) -> float:
    fn = f.norm()
    if fn == 0:
        return 0.0
    if mode == "max":
        out = maximal_op(f, masks)
    elif mode == "osc":
        if N is None:
            raise ValueError("osc mode needs a lacunary sequence")
        out = osc_op(f, masks, N)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return f.grid.sample_norm(out) / fn


def _probe_bins(masks: MaskFamily) -> list[tuple[int, int]]:
    probes = []
    d1, d2 = masks.radius(0, 0), masks.radius(1, 0)
    for p1, p2 in masks.bins:
        probes.append((p1, p2))
        probes.append((p1 + d1, p2 + d2))
    return probes


def norm_estimate(masks: MaskFamily, mode: str = "max", N: LacunarySeq | None = None,
                  trials: int = 16, seed: int = 0, ascent_steps: int = 16) -> NormEstimate:
    """Empirical lower bound on ``||Op||_{2->2}`` by random search plus greedy ascent.

    Candidates are single bins at every ``lambda`` and at a corner of its unit
    box, then ``trials`` unit-normalized complex Gaussian spectra supported on
    the unit boxes, then ``ascent_steps`` single-bin perturbations of the
    incumbent. Only the unit boxes matter: the operator ignores every other
    bin while they still count in ``||f||``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    g = masks.grid
    support = np.argwhere(masks.mask(0, 0))
    if support.size == 0:
        return NormEstimate(0.0, None, 0, [])
    history = []
    best, witness = -1.0, None

    def consider(c):
        nonlocal best, witness
        f = Spectrum2(g, c)
        r = operator_ratio(f, masks, mode, N)
        history.append(r)
        if r > best:
            best, witness = r, f
        return r

    ax1, ax2 = g.axis(0), g.axis(1)
    for k1, k2 in _probe_bins(masks):
        c = np.zeros(g.shape, dtype=complex)
        c[ax1.index_of(k1), ax2.index_of(k2)] = 1.0
        consider(c)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        c = np.zeros(g.shape, dtype=complex)
        z = rng.standard_normal(len(support)) + 1j * rng.standard_normal(len(support))
        c[support[:, 0], support[:, 1]] = z / np.linalg.norm(z)
        consider(c)
    rng = np.random.default_rng([seed, trials, 1])
    scale = 1.0
    for _ in range(ascent_steps):
        c = witness.coeffs.copy()
        i = support[rng.integers(len(support))]
        amp = float(np.max(np.abs(c)))
        c[i[0], i[1]] += scale * amp * (rng.standard_normal() + 1j * rng.standard_normal())
        before = best
        consider(c)
        if best <= before:
            scale *= 0.8
    return NormEstimate(best, witness, len(history), history)
