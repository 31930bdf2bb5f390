import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irclab import ValidationError
from irclab.torus import (
    CANTOR,
    GOLDEN_MEAN,
    DigitSet,
    GapTable,
    IntervalUnion,
    berend_peres,
    cover,
    cover_gap_after_dilation,
    dilate,
    dilation_density,
    divisibility_fraction,
    eps_dense,
    extract_J,
    first_primes,
    folner_mult,
    max_folner,
    star_discrepancy,
    weyl_discrepancy,
)

# frozen from tests/oracles/weyl_oracle.py (mpmath, 60 digits, exact sorted-point formula)
WEYL_PINNED = {
    ("squares", "sqrt(2)", 100): 0.07480579111720419,
    ("squares", "sqrt(2)", 100_000): 0.00287238174208172,
    ("naturals", "golden", 10_000): 0.0002567676941102143,
}


def F(a, b=1):
    return Fraction(a, b)


def test_cover_examples():
    assert cover(CANTOR, 1).arcs == ((F(0), F(1, 3)), (F(2, 3), F(1)))
    assert cover(DigitSet(2), 5).is_full()
    U = cover(CANTOR, 2)
    assert len(U.arcs) == 4 and all(b - a == F(1, 9) for a, b in U.arcs)


@pytest.mark.parametrize("Y", [CANTOR, GOLDEN_MEAN, DigitSet(5, (0, 1, 3))], ids=["cantor", "golden", "base5"])
def test_cover_refines(Y):
    for m in range(1, 5):
        fine, coarse = cover(Y, m + 1), cover(Y, m)
        for a, b in fine.arcs:
            assert coarse.contains(a) and coarse.contains(b) and coarse.contains((a + b) / 2)


def test_golden_mean_words_are_fibonacci():
    fib = [2, 3]
    while len(fib) < 12:
        fib.append(fib[-1] + fib[-2])
    for m in range(1, 12):
        assert len(GOLDEN_MEAN.words(m)) == fib[m - 1]
    assert all("11" not in w for w in GOLDEN_MEAN.words(8))


def test_digit_set_validation():
    with pytest.raises(ValidationError):
        DigitSet(1)
    with pytest.raises(ValidationError):
        DigitSet(3, (0, 5))
    with pytest.raises(ValidationError):
        DigitSet(2, None, ("0", "1"))
    assert CANTOR.maps_onto_itself() and CANTOR.is_shift_invariant(4)


def test_dilate_examples():
    U = cover(CANTOR, 2)
    assert dilate(U, 1) == U
    assert dilate(IntervalUnion.from_arcs([(F(0), F(1, 3))]), 3).is_full()
    # arcs [0,1/9], [2/9,1/3], [2/3,7/9], [8/9,1] doubled, reduced mod 1 and merged
    assert dilate(U, 2).arcs == ((F(0), F(2, 9)), (F(1, 3), F(2, 3)), (F(7, 9), F(1)))


def test_eps_dense_examples():
    full = IntervalUnion.full()
    assert eps_dense(full, F(1, 1000)) == (True, 0)
    U = IntervalUnion.from_arcs([(F(0), F(1, 3)), (F(2, 3), F(1))])
    assert eps_dense(U, F(1, 6)) == (False, F(1, 3))
    assert eps_dense(U, F(1, 6) + F(1, 10**9))[0]
    pts = IntervalUnion.from_arcs([(F(0), F(0)), (F(1, 2), F(1, 2))])
    assert eps_dense(pts, F(1, 4)) == (False, F(1, 2))
    assert eps_dense(pts, F(26, 100))[0]


arcs = st.lists(
    st.tuples(st.integers(0, 60), st.integers(0, 20)).map(lambda t: (F(t[0], 61), F(t[0] + t[1], 61))),
    min_size=1,
    max_size=6,
)


@given(arcs, st.integers(1, 12))
@settings(max_examples=80)
def test_dilate_measure_and_denominators(arc_list, n):
    U = IntervalUnion.from_arcs(arc_list)
    V = dilate(U, n)
    assert V.measure() <= min(1, n * U.measure())
    for a, b in V.arcs:
        assert 61 % a.denominator == 0 and 61 % b.denominator == 0


@given(arcs, st.integers(1, 5), st.integers(1, 40), st.integers(1, 40))
@settings(max_examples=80)
def test_eps_dense_monotone(arc_list, n, e1, e2):
    U = dilate(IntervalUnion.from_arcs(arc_list), n)
    lo, hi = sorted((F(e1, 80), F(e2, 80)))
    if eps_dense(U, lo)[0]:
        assert eps_dense(U, hi)[0]
    sub = IntervalUnion.from_arcs(U.arcs[:1])
    if eps_dense(sub, lo)[0]:
        assert eps_dense(U, lo)[0]


@given(st.integers(1, 5), st.integers(1, 400))
@settings(max_examples=80, deadline=None)
def test_integer_gap_matches_rational_dilation(m, n):
    P = 3**m
    gap = cover_gap_after_dilation(CANTOR.word_values(m), P, n)
    assert Fraction(gap, P) == dilate(cover(CANTOR, m), n).max_gap()


def test_folner_examples():
    assert folner_mult(1).elements == (1, 2)
    assert sorted(folner_mult(2).elements) == [1, 2, 3, 4, 6, 9, 12, 18, 36]
    assert sum(1 for n in folner_mult(3).elements if n % 6 == 0) == 36
    for m in range(1, 6):
        els = folner_mult(m).elements
        assert len(els) == len(set(els)) == (m + 1) ** m
    for m in range(1, 5):
        assert max(folner_mult(m).elements) == max_folner(m) == math.prod(first_primes(m)) ** m


def test_full_circle_density_is_one():
    for m in range(1, 4):
        assert dilation_density(DigitSet(2), m, F(1, 50)).fraction == 1


def test_small_cantor_verdicts():
    res = dilation_density(CANTOR, 1, F(1, 5))
    rows = {r.n: r for r in res.rows}
    # n = 1: gap 1/3 < 2/5, so Y itself is already 1/5-dense
    assert rows[1].max_gap == F(1, 3) and rows[1].verdict == "dense"
    assert rows[2].verdict == "dense"
    assert res.fraction == 1


def test_cantor_density_pinned_small():
    # frozen from tests/oracles/dilation_oracle.py
    table = GapTable(CANTOR, 6)
    got = [dilation_density(CANTOR, m, F(1, 20), table=table) for m in (1, 2, 3)]
    assert [g.fraction for g in got] == [0, 0, F(13, 16)]
    assert all(g.ambiguous == 0 for g in got)


def test_extract_J_full_circle():
    res = extract_J(DigitSet(2), 3, r_max=8)
    assert all(v == 1 for v in res.trace.values())
    assert set(res.J) == set(folner_mult(1).elements) | set(folner_mult(2).elements) | set(folner_mult(3).elements)


def test_extract_J_small_horizon_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = extract_J(DigitSet(3, (0,)), 2, r_max=4)
    assert res.J == ()
    assert caught


def test_condensation_construction():
    bp = berend_peres(3)
    assert bp.Q[:2] == (2, 2310) and bp.m_seq == (1, 5, 55)
    assert bp.Q[2] == math.prod(first_primes(55))
    for i in range(1, 3):
        M = max_folner(2 * bp.m_seq[i - 1])
        target = max(4 * M * bp.Q[i - 1], 2 ** (i + 2) * M)
        # least primorial above the target
        assert bp.Q[i] > target >= bp.Q[i] // first_primes(bp.m_seq[i])[-1]
    assert bp.points(1) == [F(0), F(1, 2)]
    assert berend_peres(4, "scaled").scaled


@pytest.mark.parametrize("i", [1, 2, 3])
def test_implication_on_multiples(i):
    bp = berend_peres(3)
    q, M = bp.Q[i - 1], max_folner(2 * bp.m_seq[i - 1])
    for c in (1, 2, 3, 7, 2**20 + 1, M // q):
        assert bp.spread(c * q) < F(1, 2**i)


def test_single_term_condensation():
    bp = berend_peres(1)
    # Y_1 = {0, 1/2}: n Y_1 = {0} exactly when n is even
    assert bp.condensation_stat(2, F(1, 4), t=1) == F(sum(1 for n in folner_mult(2).elements if n % 2 == 0), 9)


def test_divisibility_fraction():
    for m in range(1, 5):
        for s in range(m + 1):
            direct, closed = divisibility_fraction(m, s)
            assert direct == closed == F(m, m + 1) ** s


def test_weyl_basic():
    assert weyl_discrepancy("naturals", 0, 50).discrepancy == 1.0
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always")
        assert weyl_discrepancy("naturals", F(1, 3), 30).rational_alpha
    assert weyl_discrepancy("naturals", "golden", 10_000).discrepancy < 0.01
    vec = weyl_discrepancy("naturals", ["sqrt(2)", "sqrt(3)"], 500)
    assert len(vec.per_coordinate) == 2 and vec.box_estimate is not None


@pytest.mark.parametrize("key", sorted(WEYL_PINNED))
def test_weyl_pinned(key):
    S, alpha, N = key
    assert abs(weyl_discrepancy(S, alpha, N).discrepancy - WEYL_PINNED[key]) <= 1e-9


@given(st.lists(st.fractions(0, 1).filter(lambda x: x < 1), min_size=1, max_size=30))
def test_star_discrepancy_matches_definition(points):
    """Exact sup over anchored intervals [0, t), evaluated at the points and just past them."""
    xs = sorted(points)
    N = len(xs)
    best = Fraction(0)
    for t in set(xs) | {Fraction(1)}:
        below = sum(1 for x in xs if x < t)
        upto = sum(1 for x in xs if x <= t)
        best = max(best, abs(Fraction(below, N) - t), abs(Fraction(upto, N) - t))
    got = star_discrepancy(np.array([float(x) for x in xs]))
    assert abs(got - float(best)) < 1e-12
