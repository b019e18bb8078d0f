import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ratmax.oscillation import (
    REGIONS,
    LacunarySeq,
    RegionSplit,
    all_lacunary,
    converges_diag,
    counterexample,
    lemma3_check,
    osc_1d,
    osc_2d,
    osc_mu,
    window_sups,
    witness_windows,
)


def naive_osc_2d(a, terms):
    total = 0.0
    for lo, hi in zip(terms, terms[1:]):
        best = 0.0
        for n1 in range(lo, hi + 1):
            for n2 in range(lo, hi + 1):
                best = max(best, abs(a[n1, n2] - a[lo, lo]))
        total += best**2
    return math.sqrt(total)


def test_lacunary_validation():
    N = LacunarySeq((1, 2, 4, 9))
    assert N.tau == 2.0
    assert N.windows() == [(1, 2), (2, 4), (4, 9)]
    assert LacunarySeq.geometric(3, 1.5, 2).terms == (2, 3, 5, 8)
    assert LacunarySeq.powers_of_two(1, 3).terms == (2, 4, 8)
    assert N.truncated(5).terms == (1, 2, 4)
    assert N.truncated(0) is None
    for bad in [((3, 2),), ((0, 1),), ((1, 2, 3), 2.0), ((1, 2), 1.0)]:
        with pytest.raises(ValueError):
            LacunarySeq(*bad)


def test_osc_1d_examples():
    assert osc_1d(np.ones(20), LacunarySeq((1, 2, 4, 8))) == 0
    K = 4
    N = LacunarySeq.powers_of_two(0, K)
    b = (-1.0) ** np.arange(2**K + 1)
    assert osc_1d(b, N) == pytest.approx(2 * math.sqrt(K))
    N = LacunarySeq((2, 4, 8))
    step = (np.arange(9) >= 4).astype(float)
    assert osc_1d(step, N) == 1.0
    with pytest.raises(ValueError):
        osc_1d(np.zeros(8), N)


def test_osc_2d_examples():
    N = LacunarySeq.powers_of_two(0, 4)
    assert osc_2d(np.full((17, 17), 3.0), N) == 0
    assert osc_2d(np.eye(17), N) == pytest.approx(math.sqrt(4))
    a = counterexample(16)
    assert osc_2d(a, N) == 0 and a.max() == 16


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_osc_2d_matches_naive_and_seminorm_laws(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((20, 20)) + 1j * rng.standard_normal((20, 20))
    b = rng.standard_normal((20, 20))
    N = LacunarySeq.geometric(int(rng.integers(1, 4)), 2.0, int(rng.integers(1, 3)))
    N = N.truncated(19)
    if len(N) < 2:
        return
    v = osc_2d(a, N)
    assert v == pytest.approx(naive_osc_2d(a, N.terms), rel=1e-14)
    assert osc_2d(a + (2 - 5j), N) == pytest.approx(v, rel=1e-12)
    assert osc_2d((1 + 2j) * a, N) == pytest.approx(abs(1 + 2j) * v, rel=1e-12)
    assert osc_2d(a + b, N) <= v + osc_2d(b, N) + 1e-12


def test_region_partition():
    split = RegionSplit((3, 5))
    masks = split.masks((7, 9))
    total = sum(m.astype(int) for m in masks.values())
    assert np.all(total == 1)
    assert split.region(2, 5) == "01" and split.region(3, 4) == "10"
    for n1 in range(7):
        for n2 in range(9):
            assert masks[split.region(n1, n2)][n1, n2]


def test_osc_mu_extremes():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((17, 17))
    N = LacunarySeq.powers_of_two(0, 4)
    full = osc_2d(a, N)
    big = (100, 100)
    assert osc_mu(a, N, big, "00") == pytest.approx(full)
    assert all(osc_mu(a, N, big, mu) == 0 for mu in ("01", "10", "11"))
    assert osc_mu(a, N, (1, 1), "11") == pytest.approx(full)
    assert all(osc_mu(a, N, (1, 1), mu) == 0 for mu in ("00", "01", "10"))
    with pytest.raises(ValueError):
        osc_mu(a, N, (1, 1), "22")


def test_region_split_examples():
    N = LacunarySeq.powers_of_two(0, 3)
    rep = lemma3_check(np.full((9, 9), 2.0), N, (2, 2))
    assert rep.lhs == 0 and rep.rhs == 8.0 and rep.holds
    rep = lemma3_check(counterexample(8), N, (3, 3))
    assert rep.lhs == 0 and rep.holds
    assert set(rep.parts) == set(REGIONS)


def test_witness_examples():
    assert witness_windows(np.ones((20, 20)), 0.3) is None
    spike = np.zeros((9, 9))
    spike[2, 2] = 1.0
    assert witness_windows(spike, 0.5).terms == (1, 4)
    n1, n2 = np.meshgrid(np.arange(65), np.arange(65), indexing="ij")
    alt = (-1.0) ** (n1 + n2)
    N = witness_windows(alt, 1.0)
    assert N.terms == (1, 4, 10, 22, 46)
    assert np.all(window_sups(alt, N) >= 1.0)
    with pytest.raises(ValueError):
        witness_windows(alt, 0)


def test_witness_matches_brute_force():
    def brute(a, eps):
        bound = min(a.shape) - 1
        terms = [1]
        while True:
            nk = terms[-1]
            found = None
            for u1 in range(nk, bound // 2 + 1):
                for u2 in range(nk, bound // 2 + 1):
                    if abs(a[u1, u2] - a[nk, nk]) >= eps:
                        found = (u1, u2)
                        break
                if found:
                    break
            if not found:
                break
            terms.append(2 * max(found))
        return tuple(terms) if len(terms) > 1 else None

    rng = np.random.default_rng(11)
    for _ in range(200):
        a = rng.integers(0, 3, (25, 25)) * (rng.random((25, 25)) < 0.1)
        eps = float(rng.choice([0.5, 1.0, 2.0]))
        got = witness_windows(a, eps)
        assert (got.terms if got else None) == brute(a, eps)


def test_converges_diag():
    assert converges_diag(np.full((10, 10), 1 + 1j), 1e-9)
    assert converges_diag(counterexample(64), 1e-9)
    n1 = np.arange(10)[:, None] * np.ones((1, 10))
    assert not converges_diag((-1.0) ** n1, 1.9)
    assert converges_diag((-1.0) ** n1, 2.1)
    rng = np.random.default_rng(0)
    z = rng.standard_normal((120, 120)) + 1j * rng.standard_normal((120, 120))
    tail = z[60:, 60:].ravel()
    diam = np.max(np.abs(tail[:, None] - tail[None, :]))
    assert converges_diag(z, diam + 1e-9) and not converges_diag(z, diam - 1e-9)


def test_all_lacunary_enumeration():
    seqs = list(all_lacunary(8))
    assert all(len(s) >= 2 and s.terms[-1] <= 8 for s in seqs)
    assert LacunarySeq((1, 2, 4, 8)).terms in {s.terms for s in seqs}
    assert len({s.terms for s in seqs}) == len(seqs)


def test_lacunary_exact_ratios():
    assert LacunarySeq((30, 62)).tau == 62 / 30
    N = LacunarySeq.geometric(40, 2.5, 2)
    assert all(b * 2 >= a * 5 for a, b in zip(N.terms, N.terms[1:]))
    with pytest.raises(ValueError):
        LacunarySeq((3, 7), 2.5)
