"""Fejer and box kernels, parity multipliers and Littlewood-Paley pieces on the torus.

``sigma_D`` is the Fejer kernel with triangular transform ``max(0, 1 - |xi|/D)``;
``D`` is a frequency cutoff, so ``sigma_D`` averages at spatial scale ``1/D``.
``K_D`` is the normalized indicator of ``[-D, D]`` with transform
``sin(2 pi D xi) / (2 pi D xi)``.

Convolutions are circular. On a torus every transform is evaluated at the
bins ``k / Q``, so the convolution theorem holds exactly bin by bin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ratmax.oscillation import LacunarySeq
from ratmax.torus import Spectrum2, TorusAxis, TorusGrid2


def fejer_transform(D, xi):
    """Triangle ``max(0, 1 - |xi| / D)``; exact for ``Fraction`` scalars."""
    if isinstance(xi, np.ndarray) or isinstance(D, np.ndarray):
        return np.maximum(0.0, 1.0 - np.abs(xi) / D)
    v = 1 - abs(xi) / D
    return v if v > 0 else v * 0


def box_transform(D, xi):
    """``sin(2 pi D xi) / (2 pi D xi)``, equal to 1 at ``xi = 0``."""
    return np.sinc(2.0 * np.asarray(D, dtype=float) * np.asarray(xi, dtype=float))


def fejer_kernel(D, x):
    """``(1/D) (sin(pi D x) / (pi x))**2``, continuous at ``x = 0``."""
    return D * np.sinc(D * np.asarray(x, dtype=float)) ** 2


def box_kernel(D, x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) <= D, 1.0 / (2.0 * D), 0.0)


def fejer_combination_transform(D, xi):
    """Transform of ``2 sigma_{2D} - sigma_D``: 1 on ``|xi| <= D``, 0 on ``|xi| >= 2D``."""
    return 2 * fejer_transform(2 * D, xi) - fejer_transform(D, xi)


def _pow2(e: int) -> Fraction:
    return Fraction(2) ** e


@dataclass(frozen=True)
class DyadicScalePair:
    """Fejer cutoffs matched to even (``D1``) and odd (``D2``) annulus supports at index ``n``."""

    n: int

    @property
    def D1(self) -> Fraction:
        return _pow2(-2 * math.ceil((self.n + 1) / 2))

    @property
    def D2(self) -> Fraction:
        return _pow2(-2 * ((self.n + 1) // 2) - 1)

    def for_parity(self, parity: int) -> Fraction:
        return self.D1 if parity == 0 else self.D2


# -- annuli and parity ---------------------------------------------------


def annulus_index(k: int, Q: int) -> int | None:
    """The ``n`` with ``2**(-n-1) <= |k|/Q < 2**(-n)``; ``None`` for the zero bin."""
    k = abs(int(k))
    if k == 0:
        return None
    if k >= Q:
        floor_log = (k // Q).bit_length() - 1
    else:
        floor_log = -((-(-Q // k)) - 1).bit_length()
    return -floor_log - 1


def annulus_indices(axis: TorusAxis) -> np.ndarray:
    """Annulus index per bin (FFT order); the zero bin gets a sentinel and is masked by callers."""
    return np.array([annulus_index(k, axis.Q) if k else 0 for k in axis.bins], dtype=np.int64)


def axis_parity(axis: TorusAxis) -> np.ndarray:
    """``0``/``1`` for bins in even/odd annuli, ``-1`` for the excluded zero bin."""
    par = annulus_indices(axis) % 2
    par[axis.bins == 0] = -1
    return par


def parity_masks(grid: TorusGrid2) -> dict[tuple[int, int], np.ndarray]:
    """The four tensor products ``m_d1 (x) m_d2`` of even/odd annulus indicators."""
    p1, p2 = axis_parity(grid.axis(0)), axis_parity(grid.axis(1))
    return {(a, b): np.outer(p1 == a, p2 == b) for a in (0, 1) for b in (0, 1)}


def rectangle_mask(grid: TorusGrid2, n1: int, n2: int) -> np.ndarray:
    """``A_n1 x A_n2`` at the origin, decided exactly in integers (``n`` may be negative)."""

    def axis_mask(axis: TorusAxis, n: int):
        e = n + 1
        if e >= 0:
            return np.array([abs(int(k)) << e < axis.Q for k in axis.bins], dtype=bool)
        return np.array([abs(int(k)) < axis.Q << -e for k in axis.bins], dtype=bool)

    return np.outer(axis_mask(grid.axis(0), n1), axis_mask(grid.axis(1), n2))


def random_parity_spectrum(grid: TorusGrid2, parity, rng: np.random.Generator) -> Spectrum2:
    m = parity_masks(grid)[tuple(parity)]
    z = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return Spectrum2(grid, np.where(m, z, 0))


@dataclass(frozen=True)
class FejerIdentityReport:
    max_rel_err: float
    max_abs_err: float
    D: tuple[Fraction, Fraction]


def fejer_identity_check(f: Spectrum2, n1: int, n2: int, parity=(0, 1)) -> FejerIdentityReport:
    """Compare the rectangle multiplier with the tensor Fejer combination on a parity-supported ``f``.

    The left side masks ``f`` with ``A_n1 x A_n2``; the right side multiplies
    by ``(2 F sigma_{2D1} - F sigma_{D1}) (x) (2 F sigma_{2D2} - F sigma_{D2})``
    with cutoffs chosen from the parities of the two axes.
    """
    parity = tuple(parity)
    g = f.grid
    allowed = parity_masks(g)[parity]
    if np.any(f.coeffs[~allowed] != 0):
        raise ValueError(f"spectrum is not supported on the parity-{parity} annuli")
    lhs = np.fft.ifft2(f.coeffs * rectangle_mask(g, n1, n2))
    D1 = DyadicScalePair(n1).for_parity(parity[0])
    D2 = DyadicScalePair(n2).for_parity(parity[1])
    w1 = fejer_combination_transform(float(D1), g.axis(0).freqs)
    w2 = fejer_combination_transform(float(D2), g.axis(1).freqs)
    rhs = np.fft.ifft2(f.coeffs * np.outer(w1, w2))
    abs_err = float(np.max(np.abs(lhs - rhs), initial=0.0))
    scale = float(np.max(np.abs(lhs), initial=0.0))
    rel = abs_err / scale if scale > 0 else abs_err
    return FejerIdentityReport(rel, abs_err, (D1, D2))


# -- maximal averages ----------------------------------------------------


def dyadic_radii(axis: TorusAxis) -> list[int]:
    """Sample radii ``2**n / spacing`` of the dyadic scales that fit in half the torus."""
    out, n = [], 0
    while True:
        r = (2**n) / axis.spacing
        if r >= axis.L / 2:
            return out
        if r >= 1 and float(r).is_integer():
            out.append(int(r))
        n += 1


def box_average(g, r: int) -> np.ndarray:
    """Circular mean of ``g`` over the ``2r + 1`` samples centered at each point."""
    g = np.asarray(g)
    L = g.shape[0]
    if not 0 <= 2 * r + 1 <= L:
        raise ValueError(f"radius {r} does not fit on {L} samples")
    ext = np.concatenate([g[L - r:], g, g[:r]]) if r else g
    cs = np.concatenate([[0], np.cumsum(ext)])
    return (cs[2 * r + 1:] - cs[:-(2 * r + 1)]) / (2 * r + 1)


def hl_maximal(g, radii) -> np.ndarray:
    """``sup_r |box_average(g, r)|`` over the given sample radii."""
    out = np.zeros(np.shape(g))
    for r in radii:
        np.maximum(out, np.abs(box_average(g, r)), out=out)
    return out


def fejer_family(g, axis: TorusAxis, n_values) -> np.ndarray:
    """Rows ``sigma_{2**-n} * g`` (spatial scale ``2**n``) for each ``n``."""
    c = np.fft.fft(np.asarray(g, dtype=complex))
    xi = axis.freqs
    return np.array([np.fft.ifft(c * fejer_transform(2.0**-n, xi)) for n in n_values])


def fejer_maximal(g, axis: TorusAxis, n_values) -> np.ndarray:
    return np.max(np.abs(fejer_family(g, axis, n_values)), axis=0)


# -- Littlewood-Paley ----------------------------------------------------


def lp_profile(t):
    """Raised cosine ``cos(pi t / 2)**2`` on ``|t| < 1``; integer translates sum to 1."""
    t = np.asarray(t, dtype=float)
    return np.where(np.abs(t) < 1, np.cos(np.pi * t / 2) ** 2, 0.0)


def lp_weights(axis: TorusAxis, j: int) -> np.ndarray:
    """``phi_j(xi) = psi(log2|xi| + j)`` per bin, zero at the zero bin."""
    xi = np.abs(axis.freqs)
    out = np.zeros(axis.L)
    nz = xi > 0
    out[nz] = lp_profile(np.log2(xi[nz]) + j)
    return out


def lp_octaves(axis: TorusAxis) -> range:
    """All ``j`` whose weight is nonzero on some bin of ``axis``."""
    xi = np.abs(axis.freqs)
    t = np.log2(xi[xi > 0])
    lo = math.floor(-t.max()) - 1
    hi = math.ceil(-t.min()) + 1
    js = [j for j in range(lo, hi + 1) if np.any(lp_weights(axis, j) > 0)]
    return range(js[0], js[-1] + 1)


def lp_project(coeffs, axis: TorusAxis, j: int) -> np.ndarray:
    """``S_j g`` in samples from FFT-ordered coefficients of ``g``."""
    octs = lp_octaves(axis)
    if j not in octs:
        raise ValueError(f"octave {j} not resolvable on this axis (valid {octs.start}..{octs.stop - 1})")
    return np.fft.ifft(np.asarray(coeffs) * lp_weights(axis, j))


# -- decay and oscillation of the Fejer family ---------------------------


@dataclass(frozen=True)
class DecayReport:
    sup_ratio: float
    argmax: tuple[int, float]
    delta: float


def decay_bound(u, delta: float):
    au = np.abs(u)
    with np.errstate(divide="ignore"):
        return np.minimum(1.0, np.minimum(au**delta, np.where(au > 0, au**-delta, np.inf)))


def decay_check(n_values, delta: float, xi) -> DecayReport:
    """``sup |F sigma_{2**-n}(xi) - F K_{2**n}(xi)| / min(1, |2**n xi|**d, |2**n xi|**-d)``.

    The Fejer member has spatial scale ``2**n`` to match ``K_{2**n}``. Points
    where the bound vanishes (``xi = 0``) have a zero numerator and count as 0.
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    xi = np.asarray(xi, dtype=float)
    best, arg = 0.0, (None, None)
    for n in n_values:
        u = 2.0**n * xi
        num = np.abs(fejer_transform(1.0, u) - box_transform(1.0, u))
        den = decay_bound(u, delta)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(den > 0, num / den, 0.0)
        i = int(np.argmax(r))
        if r[i] > best:
            best, arg = float(r[i]), (int(n), float(xi[i]))
    return DecayReport(best, arg, delta)


@dataclass
class FejerOscReport:
    ratio: float
    osc: np.ndarray


def fejer_stable_level(axis: TorusAxis) -> int:
    """From this ``n`` on, ``sigma_{2**-n} * g`` is the mean of ``g``."""
    return (axis.Q - 1).bit_length()


def osc_fejer_1d(g, axis: TorusAxis, N: LacunarySeq) -> FejerOscReport:
    """Pointwise one-parameter oscillation of ``(sigma_{2**-n} * g : n >= 0)`` along ``N``.

    Indices past :func:`fejer_stable_level` are read at that level, which is
    exact because the family is constant from there on.
    """
    g = np.asarray(g, dtype=complex)
    top = fejer_stable_level(axis)
    fam = fejer_family(g, axis, range(top + 1))
    total = np.zeros(axis.L)
    for lo, hi in N.windows():
        a, b = min(lo, top), min(hi, top)
        total += np.max(np.abs(fam[a:b + 1] - fam[a]), axis=0) ** 2
    osc = np.sqrt(total)
    gn = axis.sample_norm2(g)
    ratio = math.sqrt(axis.sample_norm2(osc) / gn) if gn > 0 else 0.0
    return FejerOscReport(ratio, osc)
