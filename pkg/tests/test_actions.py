import itertools
import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irclab import CapExceeded, ResolutionError, ValidationError
from irclab.actions import (
    BlockPermutation,
    ChaconShiftSystem,
    PrefixGroupSystem,
    alt_generators,
    apply_permutation,
    blocks_needed,
    cycle_generator,
    induced_cell_permutation,
    orbit_stat,
    random_symmetric_element,
    rblock_bounds,
    rblock_containment,
    rblock_count,
    sunny_side_up,
    sym_generators,
    transitivity_check,
)
from irclab.hyperspace import FullShiftProfile, LevelSet
from irclab.symbolic import chacon_offsets, chacon_text

# chi-square 0.999 quantiles for 1 and 23 degrees of freedom
CHI2_999 = {1: 10.828, 23: 49.728}


def test_apply_permutation_examples():
    A = LevelSet(2, {"00", "01"})
    assert apply_permutation(BlockPermutation.identity(2), A) == A
    g = BlockPermutation.from_mapping(2, {"00": "11", "11": "00"})
    assert apply_permutation(g, A) == LevelSet(2, {"11", "01"})
    assert apply_permutation(g.inverse(), apply_permutation(g, A)) == A


def test_apply_permutation_level_checks():
    g = BlockPermutation.identity(3)
    with pytest.raises(ValidationError):
        apply_permutation(g, LevelSet(2, {"00"}))
    bc = BlockPermutation.identity(1, "block-code")
    with pytest.raises(ValidationError):
        apply_permutation(bc, LevelSet(2, {"00000"}, True))
    with pytest.raises(ValidationError):
        BlockPermutation(1, (0, 0), "prefix")


def test_block_code_acts_blockwise():
    swap = BlockPermutation.from_mapping(1, {"000": "111", "111": "000"}, "block-code")
    A = LevelSet(4, {"000101111"}, True)
    assert apply_permutation(swap, A) == LevelSet(4, {"111101000"}, True)
    assert sorted(induced_cell_permutation(swap, 1)) == list(range(8))


@given(st.integers(1, 3), st.integers(0, 3), st.integers(0, 2**32), st.data())
@settings(max_examples=60)
def test_permutation_round_trip_and_cardinality(k, extra, seed, data):
    g = random_symmetric_element(k, seed=seed)
    level = k + extra
    pool = ["".join(w) for w in itertools.product("01", repeat=level)]
    cells = data.draw(st.sets(st.sampled_from(pool), min_size=1, max_size=8))
    A = LevelSet(level, frozenset(cells))
    B = apply_permutation(g, A)
    assert apply_permutation(g.inverse(), B) == A
    assert len(B) == len(A)


def test_random_element_is_deterministic():
    assert random_symmetric_element(3, seed=5) == random_symmetric_element(3, seed=5)
    assert random_symmetric_element(3, seed=5, index=1) != random_symmetric_element(3, seed=5, index=0)
    with pytest.raises(CapExceeded):
        random_symmetric_element(21, seed=0)


@pytest.mark.parametrize("k,draws", [(1, 10_000), (2, 100_000)])
def test_random_element_uniform(k, draws):
    counts = Counter(random_symmetric_element(k, seed=2024, index=i).table for i in range(draws))
    cats = math.factorial(2**k)
    assert len(counts) == cats
    expected = draws / cats
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < CHI2_999[cats - 1]


def orbit_by_group_closure(generators, r, mode):
    """Orbit of the first r cells under the full group, built by closing the generator set."""
    size = len(generators[0])
    group = {tuple(range(size))}
    frontier = list(group)
    while frontier:
        nxt = []
        for h in frontier:
            for g in generators:
                gh = tuple(g[h[x]] for x in range(size))
                if gh not in group:
                    group.add(gh)
                    nxt.append(gh)
        frontier = nxt
    start = tuple(range(r))
    orbit = {tuple(sorted(h[x] for x in start)) if mode == "set" else tuple(h[x] for x in start) for h in group}
    total = math.comb(size, r) if mode == "set" else math.perm(size, r)
    return len(orbit) == total


@pytest.mark.parametrize("size", range(2, 7))
@pytest.mark.parametrize("family", ["sym", "alt", "cycle"])
def test_transitivity_matches_group_closure(size, family):
    gens = {"sym": sym_generators, "alt": alt_generators, "cycle": lambda s: [cycle_generator(s)]}[family](size)
    for r in range(1, size + 1):
        for mode in ("set", "tuple"):
            assert transitivity_check(gens, r, mode) == orbit_by_group_closure(gens, r, mode)


def test_transitivity_examples():
    assert not transitivity_check([cycle_generator(4)], 2, "tuple")
    alt = alt_generators(4)
    assert transitivity_check(alt, 2, "set") and transitivity_check(alt, 2, "tuple")
    assert transitivity_check(alt, 3, "set")
    # Alt(4) is 2-transitive but not 3-transitive on ordered triples
    assert not transitivity_check(alt, 3, "tuple")


@given(st.integers(2, 6), st.integers(1, 6))
def test_tuple_implies_set(size, r):
    r = min(r, size)
    for gens in (sym_generators(size), alt_generators(size), [cycle_generator(size)]):
        if transitivity_check(gens, r, "tuple"):
            assert transitivity_check(gens, r, "set")


def test_transitivity_errors():
    with pytest.raises(ValidationError):
        transitivity_check([[0, 0, 1]], 1)
    with pytest.raises(ValidationError):
        transitivity_check([[1, 0]], 3)


def test_chacon_D_statistic_small_window():
    system = ChaconShiftSystem(4)
    Y = chacon_offsets(5)
    stat = orbit_stat(system, Y, range(0, 200), Fraction(1, 32), "D")
    assert stat.fraction == 1 and stat.exact
    # the point T^j x_C is itself 2^-5-far from every translate T^(j+l) x_C
    text = chacon_text(9)
    for j in range(4, 200):
        assert all(text[j - 4 : j + 5] != text[j + l - 4 : j + l + 5] for l in Y)


def test_D_and_Z_are_complementary():
    system = ChaconShiftSystem(4)
    Y = chacon_offsets(3)
    D = orbit_stat(system, Y, range(4, 300), Fraction(1, 4), "D")
    Z = orbit_stat(system, Y, range(4, 300), Fraction(1, 4), "Z")
    assert D.fraction + Z.fraction == 1


def test_full_set_is_always_close():
    system = PrefixGroupSystem(2, 2)
    full = FullShiftProfile(2).full_levelset(3)
    stat = orbit_stat(system, full, list(system.exhaustive()), Fraction(1, 4), "Z")
    assert stat.fraction == 1


def test_resolution_guard():
    system = ChaconShiftSystem(4)
    with pytest.raises(ResolutionError):
        orbit_stat(system, chacon_offsets(3), range(4, 10), Fraction(1, 64), "D")


def oracle_zk(k, level, e):
    """Z_k(Y, 2^-e) by brute force: relabel prefixes by hand and compare level-e truncations."""
    Y = sunny_side_up(level).cells
    full = {"".join(w) for w in itertools.product("01", repeat=e)}
    prefixes = ["".join(w) for w in itertools.product("01", repeat=k)]
    hits = total = 0
    for perm in itertools.permutations(prefixes):
        table = dict(zip(prefixes, perm))
        image = {table[c[:k]] + c[k:] for c in Y}
        hits += {c[:e] for c in image} == full
        total += 1
    return Fraction(hits, total)


@pytest.mark.parametrize("k", [1, 2])
def test_zk_exhaustive_matches_oracle(k):
    system = PrefixGroupSystem(2, k)
    level = max(k, 3)
    stat = orbit_stat(system, sunny_side_up(level), list(system.exhaustive()), Fraction(1, 8), "Z")
    assert stat.fraction == oracle_zk(k, level, 3)
    assert stat.seed is None


def test_mc_stat_worker_independent():
    system = PrefixGroupSystem(2, 5)
    a = orbit_stat(system, sunny_side_up(5), "sample", Fraction(1, 8), "Z", samples=3000, seed=3, workers=1)
    b = orbit_stat(system, sunny_side_up(5), "sample", Fraction(1, 8), "Z", samples=3000, seed=3, workers=4)
    assert a == b
    assert a.ci_lo <= float(a.fraction) <= a.ci_hi


def brute_force_rblock(N, length, alpha, r):
    hits = 0
    for S in itertools.combinations(range(1, N + 1), alpha):
        # every point needs an interval; the best cover places one at the first uncovered point
        blocks, covered = 0, 0
        for p in S:
            if p > covered:
                blocks += 1
                covered = min(p, N - length + 1) + length - 1
        hits += blocks <= r
    return hits


def test_rblock_example():
    res = rblock_containment(2, 2, 1, 2, 1)
    assert res.probability == Fraction(1, 2)
    assert rblock_containment(2, 3, 1, 2, 2).probability == 1


def enumerable_instances():
    for n, m in [(2, 2), (2, 3), (2, 4), (3, 2), (4, 2)]:
        N = n**m
        for k in range(1, m + 1):
            for alpha in range(1, N + 1):
                for r in range(1, 4):
                    yield n, m, k, alpha, r


def test_rblock_dp_matches_enumeration():
    for n, m, k, alpha, r in enumerable_instances():
        N, length = n**m, n ** (m - k)
        assert rblock_count(N, length, alpha, r) == brute_force_rblock(N, length, alpha, r), (n, m, k, alpha, r)


def test_rblock_bounds_dominate_exact():
    for n, m, k, alpha, r in enumerable_instances():
        exact = rblock_containment(n, m, k, alpha, r).probability
        count_bound, envelope, vacuous = rblock_bounds(n, m, k, alpha, r)
        assert exact <= count_bound
        if not vacuous:
            assert exact <= envelope


def test_blocks_needed_greedy_is_optimal_small():
    N, length = 8, 3
    for S in itertools.combinations(range(1, N + 1), 3):
        best = None
        for r in range(1, 4):
            for starts in itertools.combinations(range(1, N - length + 2), r):
                if all(any(s <= p < s + length for s in starts) for p in S):
                    best = r
                    break
            if best:
                break
        assert blocks_needed(S, N, length) == best


def test_rblock_mc_reproducible_and_below_bound():
    a = rblock_containment(2, 10, 3, 32, 2, "mc", samples=10_000, seed=1)
    b = rblock_containment(2, 10, 3, 32, 2, "mc", samples=10_000, seed=1, workers=3)
    c = rblock_containment(2, 10, 3, 32, 2, "mc", samples=10_000, seed=2)
    assert a == b
    assert a.gamma == Fraction(1, 4) and not a.vacuous
    assert a.probability <= a.envelope
    sigma = math.sqrt(a.stderr**2 + c.stderr**2)
    assert abs(a.probability - c.probability) <= 3 * sigma or a.probability == c.probability


def test_rblock_bound_mode_flags_vacuous():
    res = rblock_containment(2, 4, 1, 4, 2, "bound")
    assert res.vacuous and res.envelope is None
    with pytest.raises(ValidationError):
        rblock_containment(2, 2, 1, 5, 1)
